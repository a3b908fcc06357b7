"""
Базовая модель для результатов вычислений.
"""

import math
from enum import Enum
from fractions import Fraction
from typing import Any

from pydantic import BaseModel as PydanticBaseModel
from pydantic import ConfigDict


def jsonable(value: Any) -> Any:
    """Привести значение к виду, пригодному для JSON-отчёта."""
    if isinstance(value, PydanticBaseModel):
        return jsonable(value.model_dump())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "__float__"):
        return jsonable(float(value))
    return str(value)


class BaseModel(PydanticBaseModel):
    """Базовая неизменяемая модель с сериализацией в отчёт."""

    model_config = ConfigDict(
        frozen=True,
        arbitrary_types_allowed=True,
        validate_default=True,
    )

    def to_report(self) -> dict:
        """Преобразовать модель в словарь для JSON-отчёта."""
        return jsonable(self)
