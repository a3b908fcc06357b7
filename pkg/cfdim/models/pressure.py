"""
Модели запросов и скобок диофантовой функции давления.
"""

import math
from enum import Enum
from typing import Optional

from pydantic import Field, model_validator

from .base import BaseModel


class PressureMethod(str, Enum):
    """Способ вычисления сумм Σ q_n^{-2θ}."""

    ENUMERATE = "enumerate"
    OPERATOR_ITERATION = "operator_iteration"


class BracketKind(str, Enum):
    """Вид скобки: ограниченное давление P_M или полное P."""

    RESTRICTED = "restricted"
    FULL = "full"


class PressureQuery(BaseModel):
    """Запрос на вычисление P_M(θ) или P(θ)."""

    theta: float = Field(..., description="Параметр θ")
    digit_cap: Optional[int] = Field(None, ge=1, description="Ограничение цифр M (None = без ограничения)")
    depth: int = Field(..., ge=1, description="Глубина n")
    method: PressureMethod = Field(PressureMethod.ENUMERATE, description="Метод вычисления")
    grid_size: int = Field(512, ge=8, description="Размер сетки оператора")
    interpolation_order: int = Field(3, ge=1, le=3, description="Порядок интерполяции на сетке")
    margin: float = Field(0.005, gt=0, description="Отступ от особенности θ=1/2")

    @model_validator(mode="after")
    def _check_theta(self):
        if not math.isfinite(self.theta) or self.theta <= 0:
            raise ValueError(f"theta={self.theta} должно быть положительным")
        if self.digit_cap is None and self.theta <= 0.5 + self.margin:
            raise ValueError(
                f"theta={self.theta} слишком близко к особенности 1/2 для неограниченного алфавита"
            )
        return self

    @property
    def unbounded(self) -> bool:
        return self.digit_cap is None


class PressureBracket(BaseModel):
    """
    Скобка [lower, upper] для P_M(θ) или P(θ).

    certified=False помечает оценку полного давления оператором с дзета-хвостом:
    такая скобка не учитывает ошибку интерполяции и хвоста.
    """

    theta: float
    lower: float
    upper: float
    kind: BracketKind
    digit_cap: Optional[int] = Field(None, description="M, None для неограниченного алфавита")
    depth: int = Field(..., ge=1)
    method: PressureMethod
    tail: float = Field(0.0, ge=0, description="Вклад δ_M(θ) в верхнюю границу")
    estimate: Optional[float] = Field(None, description="Точечная оценка внутри скобки")
    converged: bool = True
    certified: bool = Field(True, description="False для оценки оператором без хвостовой поправки")
    runtime: float = Field(0.0, ge=0, description="Время вычисления, с")

    @model_validator(mode="after")
    def _check_order(self):
        if self.lower > self.upper:
            raise ValueError(f"lower={self.lower} > upper={self.upper}")
        if self.kind == BracketKind.FULL and self.certified and self.digit_cap is None:
            raise ValueError("Скобка P(θ) по всему алфавиту сертифицирована только при конечном M и хвосте δ_M")
        return self

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= value <= self.upper + slack

    def overlaps(self, other: "PressureBracket", slack: float = 0.0) -> bool:
        return self.lower <= other.upper + slack and other.lower <= self.upper + slack

    def strictly_above(self, value: float) -> bool:
        return self.lower > value

    def strictly_below(self, value: float) -> bool:
        return self.upper < value
