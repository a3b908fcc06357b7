"""
Модели данных cfdim.
"""

from .base import BaseModel, jsonable
from .config import OutputFormat, RunConfig
from .continued_fraction import SEED_QUAD, ContinuantQuad, CylinderInterval, DigitWord, OrbitStats
from .dimension import (
    DimensionBranch,
    DimensionResult,
    EquationKind,
    GammaScan,
    GoodBoundsReport,
    PressureEquation,
    ResultKind,
)
from .empirical import (
    BoxCountResult,
    ConstructionParams,
    CoverLevel,
    CoverScheme,
    DyadicBandCount,
    EstimateTrace,
    LemmaMode,
    LemmaNPReport,
    StoppingCoverResult,
    WangWuBracket,
)
from .pressure import BracketKind, PressureBracket, PressureMethod, PressureQuery
from .report import Provenance, Report
from .profile import (
    ExtendedKind,
    ExtendedReal,
    FunctionProfile,
    GrowthProfile,
    HypothesisReport,
    LimitTrace,
    SequenceTriple,
    SumClassification,
    SumDescriptor,
    SumFamily,
    Verdict,
)

__all__ = [
    "BaseModel",
    "jsonable",
    "OutputFormat",
    "RunConfig",
    "SEED_QUAD",
    "ContinuantQuad",
    "CylinderInterval",
    "DigitWord",
    "OrbitStats",
    "DimensionBranch",
    "DimensionResult",
    "EquationKind",
    "GammaScan",
    "GoodBoundsReport",
    "PressureEquation",
    "ResultKind",
    "BoxCountResult",
    "ConstructionParams",
    "CoverLevel",
    "CoverScheme",
    "DyadicBandCount",
    "EstimateTrace",
    "LemmaMode",
    "LemmaNPReport",
    "StoppingCoverResult",
    "WangWuBracket",
    "BracketKind",
    "PressureBracket",
    "PressureMethod",
    "PressureQuery",
    "Provenance",
    "Report",
    "ExtendedKind",
    "ExtendedReal",
    "FunctionProfile",
    "GrowthProfile",
    "HypothesisReport",
    "LimitTrace",
    "SequenceTriple",
    "SumClassification",
    "SumDescriptor",
    "SumFamily",
    "Verdict",
]
