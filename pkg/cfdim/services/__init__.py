"""
Вычислительные сервисы cfdim.
"""

from .pressure_service import PressureCurve, PressureService
from .profile_service import ProfileService
from .dimension_service import DimensionService
from .empirical_service import EmpiricalService

__all__ = [
    "PressureService",
    "PressureCurve",
    "ProfileService",
    "DimensionService",
    "EmpiricalService",
]
