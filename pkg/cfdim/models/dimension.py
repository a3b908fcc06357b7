"""
Модели уравнений давления и результатов вычисления размерности.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import Field, model_validator

from .base import BaseModel


class EquationKind(str, Enum):
    """Вид правой части уравнения P(θ) = rhs(θ)."""

    AFFINE = "affine"
    HAT = "hat"


class ResultKind(str, Enum):
    """Характер результата."""

    EXACT = "exact"
    ENCLOSURE = "enclosure"
    ESTIMATE = "estimate"
    UPPER_BOUND = "upper_bound"
    INDETERMINATE = "indeterminate"


class DimensionBranch(str, Enum):
    """Ветка формулы, по которой получен результат."""

    NO_CROSSING = "no_crossing"
    PRESSURE_ROOT = "pressure_root"
    BOUNDED_DIGITS = "bounded_digits"
    SINGLE_POINT = "single_point"
    ALPHA_ZERO = "alpha_zero"
    ALPHA_FINITE = "alpha_finite"
    ALPHA_INFINITE_XI = "alpha_infinite_xi"
    ALPHA_INFINITE_GAMMA = "alpha_infinite_gamma"
    LIMINF_SUBEXPONENTIAL = "liminf_subexponential"
    LIMINF_EXPONENTIAL = "liminf_exponential"
    LIMINF_SUPEREXPONENTIAL = "liminf_superexponential"
    LIMSUP_SUBEXPONENTIAL = "limsup_subexponential"
    LIMSUP_EXPONENTIAL = "limsup_exponential"
    LIMSUP_SUPEREXPONENTIAL = "limsup_superexponential"
    FULL_DIMENSION = "full_dimension"
    UPPER_HALF_ED = "upper_half_ed"
    UPPER_HALF_LIMSUP = "upper_half_limsup"
    EXACT_HALF_COR1 = "exact_half_cor1"
    EXACT_HALF_COR2 = "exact_half_cor2"
    EXACT_HALF_POWER = "exact_half_power"
    FAMILY_F_I = "family_F_i"
    FAMILY_F_II = "family_F_ii"
    INDETERMINATE = "indeterminate"
    LIAO_RAMS = "liao_rams"
    MAX_SPECTRUM_LIMSUP = "max_spectrum_limsup"
    MAX_SPECTRUM_LIMINF = "max_spectrum_liminf"
    DIGITS_TO_INFINITY = "digits_to_infinity"

    @property
    def label(self) -> str:
        """Короткое описание случая для отчёта."""
        return _BRANCH_LABELS[self]


_BRANCH_LABELS = {
    DimensionBranch.NO_CROSSING: "правая часть отрицательна в θ = 1, корня нет",
    DimensionBranch.PRESSURE_ROOT: "корень уравнения давления",
    DimensionBranch.BOUNDED_DIGITS: "цифры не больше N",
    DimensionBranch.SINGLE_POINT: "множество из одной точки",
    DimensionBranch.ALPHA_ZERO: "показатель α равен нулю",
    DimensionBranch.ALPHA_FINITE: "конечный показатель α > 0, уравнение через α и β",
    DimensionBranch.ALPHA_INFINITE_XI: "α = ∞, формула через ξ",
    DimensionBranch.ALPHA_INFINITE_GAMMA: "α = ∞, формула через γ",
    DimensionBranch.LIMINF_SUBEXPONENTIAL: "liminf: рост медленнее экспоненты",
    DimensionBranch.LIMINF_EXPONENTIAL: "liminf: экспоненциальный рост",
    DimensionBranch.LIMINF_SUPEREXPONENTIAL: "liminf: рост быстрее экспоненты",
    DimensionBranch.LIMSUP_SUBEXPONENTIAL: "limsup: рост медленнее экспоненты",
    DimensionBranch.LIMSUP_EXPONENTIAL: "limsup: экспоненциальный рост",
    DimensionBranch.LIMSUP_SUPEREXPONENTIAL: "limsup: рост быстрее экспоненты",
    DimensionBranch.FULL_DIMENSION: "log φ(n) = o(√n), полная размерность",
    DimensionBranch.UPPER_HALF_ED: "приращения log φ на шаге √n отделены от нуля, оценка сверху 1/2",
    DimensionBranch.UPPER_HALF_LIMSUP: "limsup log φ(n)/n = ∞, оценка сверху 1/2",
    DimensionBranch.EXACT_HALF_COR1: "log φ(n) = c√n + медленный остаток",
    DimensionBranch.EXACT_HALF_COR2: "log φ(n) = c√n + ровный на квадратах остаток",
    DimensionBranch.EXACT_HALF_POWER: "log φ(n) = n^r при 1/2 < r < 1",
    DimensionBranch.FAMILY_F_I: "ступенчатая степенная φ, уравнение через c, d, r",
    DimensionBranch.FAMILY_F_II: "ступенчатая экспоненциальная φ, уравнение через c, γ",
    DimensionBranch.INDETERMINATE: "ни один случай не подтверждён",
    DimensionBranch.LIAO_RAMS: "нижняя оценка по отношению сумм log v и log u",
    DimensionBranch.MAX_SPECTRUM_LIMSUP: "наибольшая цифра, limsup",
    DimensionBranch.MAX_SPECTRUM_LIMINF: "наибольшая цифра, liminf",
    DimensionBranch.DIGITS_TO_INFINITY: "все цифры стремятся к бесконечности",
}


class PressureEquation(BaseModel):
    """
    Уравнение P(θ) = rhs(θ).

    Аффинная правая часть: slope·θ + intercept.
    Правая часть вида hat: (√θ + √(2θ-1))²·log C.
    """

    kind: EquationKind = EquationKind.AFFINE
    slope: float = 0.0
    intercept: float = 0.0
    log_c: Optional[float] = None
    label: str = "custom"
    parameters: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_monotone(self):
        if self.kind == EquationKind.AFFINE:
            if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
                raise ValueError("Коэффициенты правой части должны быть конечными")
            if self.slope < 0:
                raise ValueError(f"slope={self.slope} < 0: правая часть должна возрастать")
        else:
            if self.log_c is None or not self.log_c > 0 or not math.isfinite(self.log_c):
                raise ValueError(f"log C = {self.log_c} должно быть положительным и конечным")
        return self

    def rhs(self, theta: float) -> float:
        """Значение правой части в точке θ ≥ 1/2."""
        if self.kind == EquationKind.HAT:
            root = math.sqrt(max(2.0 * theta - 1.0, 0.0))
            return (math.sqrt(theta) + root) ** 2 * self.log_c
        return self.slope * theta + self.intercept

    def describe(self) -> str:
        if self.kind == EquationKind.HAT:
            return f"P(θ) = (√θ+√(2θ-1))²·{self.log_c:.6g}"
        return f"P(θ) = {self.slope:.6g}·θ + {self.intercept:.6g}"

    # Конструкторы семейств

    @classmethod
    def zero(cls) -> "PressureEquation":
        return cls(label="zero")

    @classmethod
    def affine(cls, slope: float, intercept: float, label: str = "affine") -> "PressureEquation":
        return cls(slope=slope, intercept=intercept, label=label)

    @classmethod
    def type_one(cls, log_b: float) -> "PressureEquation":
        """P(θ) = θ·log B."""
        return cls(slope=log_b, intercept=0.0, label="type_one", parameters={"log_B": log_b})

    @classmethod
    def alpha_beta(cls, alpha: float, beta: float) -> "PressureEquation":
        """P(θ) = α(2θ-1) + β(1-θ) = (2α-β)θ - (α-β)."""
        return cls(
            slope=2.0 * alpha - beta,
            intercept=-(alpha - beta),
            label="alpha_beta",
            parameters={"alpha": alpha, "beta": beta},
        )

    @classmethod
    def big(cls, b: float, c: float) -> "PressureEquation":
        """P(θ) = b(2θ-1) + cθ."""
        return cls(slope=2.0 * b + c, intercept=-b, label="big_theta", parameters={"b": b, "c": c})

    @classmethod
    def hat(cls, log_c: float) -> "PressureEquation":
        return cls(kind=EquationKind.HAT, log_c=log_c, label="hat", parameters={"log_C": log_c})

    @classmethod
    def type_three(cls, log_c: float, gamma: float) -> "PressureEquation":
        """P(θ) = log C·e^γ((e^γ+1)θ - 1)/(e^γ-1)."""
        growth = math.exp(gamma)
        scale = log_c * growth / (growth - 1.0)
        return cls(
            slope=scale * (growth + 1.0),
            intercept=-scale,
            label="type_three",
            parameters={"log_C": log_c, "gamma": gamma},
        )

    @classmethod
    def eta(cls, c: float, d: float, r: float) -> "PressureEquation":
        """P(θ) = cd(1-r)(2θ-1)."""
        weight = c * d * (1.0 - r)
        return cls(
            slope=2.0 * weight,
            intercept=-weight,
            label="eta",
            parameters={"c": c, "d": d, "r": r},
        )

    @classmethod
    def xi(cls, c: float, gamma: float) -> "PressureEquation":
        """P(θ) = c((e^γ+1)θ - 1)/(e^γ-1)."""
        growth = math.exp(gamma)
        return cls(
            slope=c * (growth + 1.0) / (growth - 1.0),
            intercept=-c / (growth - 1.0),
            label="xi",
            parameters={"c": c, "gamma": gamma},
        )


class DimensionResult(BaseModel):
    """Оценка размерности Хаусдорфа [value_lo, value_hi] с веткой формулы."""

    value_lo: float = Field(..., ge=0.0, le=1.0)
    value_hi: float = Field(..., ge=0.0, le=1.0)
    branch: DimensionBranch
    kind: ResultKind = ResultKind.ENCLOSURE
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    tolerance: Optional[float] = None
    digit_cap: Optional[int] = None
    depth: Optional[int] = None
    runtime: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _check_order(self):
        if self.value_lo > self.value_hi:
            raise ValueError(f"value_lo={self.value_lo} > value_hi={self.value_hi}")
        return self

    @classmethod
    def exact(
        cls,
        value: float,
        branch: DimensionBranch,
        diagnostics: Optional[Dict[str, Any]] = None,
        notes: Optional[List[str]] = None,
    ) -> "DimensionResult":
        return cls(
            value_lo=value,
            value_hi=value,
            branch=branch,
            kind=ResultKind.EXACT,
            diagnostics=diagnostics or {},
            notes=notes or [],
        )

    @property
    def width(self) -> float:
        return self.value_hi - self.value_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.value_lo + self.value_hi)

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.value_lo - slack <= value <= self.value_hi + slack

    def strictly_below(self, other: "DimensionResult") -> bool:
        """Весь интервал левее интервала other."""
        return self.value_hi < other.value_lo


class GammaScan(BaseModel):
    """Корни уравнений типа III по сетке γ при фиксированном log C."""

    log_c: float = Field(..., gt=0)
    gammas: List[float]
    roots: List[float]
    best_gamma: float
    best_root: float
    predicted_gamma: Optional[float] = Field(None, description="log(1+√((2θ̂-1)/θ̂))")
    theta_hat: Optional[float] = None


class GoodBoundsReport(BaseModel):
    """Элементарные оценки размерности A(B) через ζ(2s)."""

    B: float = Field(..., gt=1)
    s: float = Field(..., gt=0.5, le=1.0)
    zeta_2s: float
    lower_certified: bool = Field(..., description="dim A(B) ≥ s")
    upper_certified: bool = Field(..., description="dim A(B) ≤ s")
