"""
Модели профилей роста последовательностей и функций.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Protocol, Tuple

from pydantic import Field, model_validator

from .base import BaseModel
from .dimension import DimensionBranch


class ExtendedKind(str, Enum):
    """Метка расширенного вещественного числа."""

    ZERO = "zero"
    FINITE = "finite"
    INFINITE = "infinite"
    UNKNOWN = "unknown"


class ExtendedReal(BaseModel):
    """Значение из [0, ∞] с явной меткой: ноль, конечное, бесконечность или неизвестно."""

    kind: ExtendedKind
    value: Optional[float] = None

    @model_validator(mode="after")
    def _check_value(self):
        if self.kind == ExtendedKind.FINITE:
            if self.value is None or not math.isfinite(self.value):
                raise ValueError("Конечное значение требует конечного value")
        return self

    @classmethod
    def zero(cls) -> "ExtendedReal":
        return cls(kind=ExtendedKind.ZERO, value=0.0)

    @classmethod
    def finite(cls, value: float) -> "ExtendedReal":
        return cls(kind=ExtendedKind.FINITE, value=float(value))

    @classmethod
    def infinite(cls) -> "ExtendedReal":
        return cls(kind=ExtendedKind.INFINITE)

    @classmethod
    def unknown(cls) -> "ExtendedReal":
        return cls(kind=ExtendedKind.UNKNOWN)

    @classmethod
    def from_float(cls, value: float) -> "ExtendedReal":
        """Для аналитических подстановок: 0 → ноль, ∞ → бесконечность."""
        value = float(value)
        if math.isnan(value):
            return cls.unknown()
        if math.isinf(value):
            return cls.infinite()
        if value == 0.0:
            return cls.zero()
        return cls.finite(value)

    @property
    def is_zero(self) -> bool:
        return self.kind == ExtendedKind.ZERO

    @property
    def is_finite(self) -> bool:
        return self.kind == ExtendedKind.FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind == ExtendedKind.INFINITE

    @property
    def is_known(self) -> bool:
        return self.kind != ExtendedKind.UNKNOWN

    def as_float(self) -> float:
        if self.kind == ExtendedKind.ZERO:
            return 0.0
        if self.kind == ExtendedKind.FINITE:
            return float(self.value)
        if self.kind == ExtendedKind.INFINITE:
            return math.inf
        return math.nan

    def exp(self) -> "ExtendedReal":
        """e^x для величин, хранимых в лог-шкале (ноль переходит в 1)."""
        if self.kind == ExtendedKind.ZERO:
            return ExtendedReal.finite(1.0)
        if self.kind == ExtendedKind.FINITE:
            return ExtendedReal.finite(math.exp(self.value))
        return self

    def __str__(self) -> str:
        if self.kind == ExtendedKind.FINITE:
            return f"{self.value:.6g}"
        if self.kind == ExtendedKind.ZERO:
            return "0"
        if self.kind == ExtendedKind.INFINITE:
            return "∞"
        return "?"


class Verdict(str, Enum):
    """Вердикт проверки условия на конечном горизонте."""

    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


class LogGenerator(Protocol):
    """Генератор значений в лог-шкале: (знак, log|x|)."""

    def log_eval(self, **variables: Any) -> Tuple[int, Any]:
        ...


class LimitTrace(BaseModel):
    """След оценок величины по горизонту и итог классификации предела."""

    name: str
    indices: List[float] = Field(default_factory=list)
    values: List[float] = Field(default_factory=list)
    limit: ExtendedReal = Field(default_factory=ExtendedReal.unknown)
    converged: bool = False
    extrapolated: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


@dataclass(frozen=True)
class SequenceTriple:
    """
    Тройка ({n_k}, {s_k}, {t_k}).

    Генераторы вычисляются в лог-шкале; s и t могут зависеть от k и n_k.
    overrides: аналитические значения alpha, beta, xi, gamma (0 и inf допустимы).
    """

    n_gen: Any
    s_gen: Any
    t_gen: Any
    overrides: Dict[str, float] = field(default_factory=dict)
    name: str = "triple"

    def __post_init__(self):
        unknown = set(self.overrides) - {"alpha", "beta", "xi", "gamma"}
        if unknown:
            raise ValueError(f"Неизвестные подстановки: {sorted(unknown)}")


class GrowthProfile(BaseModel):
    """Инварианты роста α, β, ξ, γ тройки последовательностей."""

    alpha: ExtendedReal
    beta: ExtendedReal
    xi: ExtendedReal
    gamma: ExtendedReal
    converged: Dict[str, bool] = Field(default_factory=dict)
    overridden: List[str] = Field(default_factory=list)
    k_max: int = Field(24, ge=1)
    traces: Dict[str, LimitTrace] = Field(default_factory=dict)
    hypotheses: Optional["HypothesisReport"] = None

    @classmethod
    def from_values(cls, alpha: float, beta: float = 0.0, xi: float = math.nan, gamma: float = math.nan) -> "GrowthProfile":
        """Профиль из аналитических значений (все помечены как сошедшиеся)."""
        values = {"alpha": alpha, "beta": beta, "xi": xi, "gamma": gamma}
        return cls(
            **{name: ExtendedReal.from_float(value) for name, value in values.items()},
            converged={name: not math.isnan(value) for name, value in values.items()},
            overridden=[name for name, value in values.items() if not math.isnan(value)],
        )

    def is_converged(self, name: str) -> bool:
        return self.converged.get(name, False)


class FunctionProfile(BaseModel):
    """
    Инварианты функции ψ (или φ) на горизонте n_max.

    log_B_psi = liminf log ψ(n)/n, log_b_psi = liminf log log ψ(n)/n,
    log_C_psi и log_c_psi: те же величины с limsup.
    """

    log_B_psi: ExtendedReal
    log_b_psi: ExtendedReal
    log_C_psi: ExtendedReal
    log_c_psi: ExtendedReal
    limit_flag: bool = False
    sqrt_scale_limsup: ExtendedReal = Field(default_factory=ExtendedReal.unknown)
    linear_scale_limsup: ExtendedReal = Field(default_factory=ExtendedReal.unknown)
    superlinear: Verdict = Verdict.INCONCLUSIVE
    condition_ed: Verdict = Verdict.INCONCLUSIVE
    condition_maxine: Verdict = Verdict.INCONCLUSIVE
    converged: Dict[str, bool] = Field(default_factory=dict)
    n_max: int = Field(2**40, ge=1)
    traces: Dict[str, LimitTrace] = Field(default_factory=dict)

    @classmethod
    def from_values(
        cls,
        log_B: float,
        log_b: float = math.nan,
        log_C: Optional[float] = None,
        log_c: Optional[float] = None,
        limit_flag: Optional[bool] = None,
    ) -> "FunctionProfile":
        """
        Профиль из аналитических значений.

        По умолчанию limsup-величины совпадают с liminf-величинами
        и верхний предел считается пределом.
        """
        log_C = log_B if log_C is None else log_C
        log_c = log_b if log_c is None else log_c
        values = {"log_B": log_B, "log_b": log_b, "log_C": log_C, "log_c": log_c}
        if limit_flag is None:
            limit_flag = log_B == log_C
        return cls(
            **{f"{name}_psi": ExtendedReal.from_float(value) for name, value in values.items()},
            limit_flag=limit_flag,
            linear_scale_limsup=ExtendedReal.from_float(log_C),
            converged={name: not math.isnan(value) for name, value in values.items()},
        )

    @property
    def B_psi(self) -> float:
        return self.log_B_psi.exp().as_float()

    @property
    def b_psi(self) -> float:
        return self.log_b_psi.exp().as_float()

    @property
    def C_psi(self) -> float:
        return self.log_C_psi.exp().as_float()

    @property
    def c_psi(self) -> float:
        return self.log_c_psi.exp().as_float()

    def is_converged(self, name: str) -> bool:
        return self.converged.get(name, False)


class HypothesisReport(BaseModel):
    """Вердикты по условиям (H1)-(H3) со свидетельствующими следами."""

    h1: Verdict
    h2: Verdict
    h3: Verdict
    witnesses: Dict[str, LimitTrace] = Field(default_factory=dict)

    @property
    def failed(self) -> List[str]:
        return [name.upper() for name in ("h1", "h2", "h3") if getattr(self, name) == Verdict.FAILS]

    @property
    def all_hold(self) -> bool:
        return all(getattr(self, name) == Verdict.HOLDS for name in ("h1", "h2", "h3"))


class SumFamily(str, Enum):
    """Именованные семейства функций φ для множеств S(φ)."""

    EXP_POWER = "exp_power"
    SQRT_PLUS_R1 = "sqrt_plus_r1"
    SQRT_PLUS_R2 = "sqrt_plus_r2"
    FLOOR_POWER = "floor_power"
    FLOOR_EXP = "floor_exp"


class SumDescriptor(BaseModel):
    """Теговый дескриптор функции φ: семейство и его параметры."""

    family: SumFamily
    c: float = Field(1.0, gt=0)
    d: float = Field(1.0, gt=0)
    r: float = Field(0.5, gt=0)
    gamma: float = Field(1.0, gt=0)
    remainder: Optional[str] = Field(None, description="Выражение для r1(n) или r2(n)")

    @model_validator(mode="after")
    def _check_family(self):
        if self.family == SumFamily.FLOOR_POWER and not 0.5 <= self.r < 1.0:
            raise ValueError(f"floor_power требует r ∈ [1/2, 1), получено {self.r}")
        return self

    @classmethod
    def exp_power(cls, r: float) -> "SumDescriptor":
        return cls(family=SumFamily.EXP_POWER, r=r)

    @classmethod
    def sqrt_plus_r1(cls, c: float, remainder: str = "log(n)") -> "SumDescriptor":
        return cls(family=SumFamily.SQRT_PLUS_R1, c=c, remainder=remainder)

    @classmethod
    def sqrt_plus_r2(cls, c: float, remainder: str = "0") -> "SumDescriptor":
        return cls(family=SumFamily.SQRT_PLUS_R2, c=c, remainder=remainder)

    @classmethod
    def floor_power(cls, c: float, d: float, r: float) -> "SumDescriptor":
        return cls(family=SumFamily.FLOOR_POWER, c=c, d=d, r=r)

    @classmethod
    def floor_exp(cls, c: float, gamma: float) -> "SumDescriptor":
        return cls(family=SumFamily.FLOOR_EXP, c=c, gamma=gamma)

    def expression(self) -> str:
        """Текст выражения φ(n) на мини-языке генераторов."""
        if self.family == SumFamily.EXP_POWER:
            return f"exp(n^{self.r!r})"
        if self.family in (SumFamily.SQRT_PLUS_R1, SumFamily.SQRT_PLUS_R2):
            return f"exp({self.c!r}*n^(1/2) + ({self.remainder or '0'}))"
        if self.family == SumFamily.FLOOR_POWER:
            power = self.r / (1.0 - self.r)
            return (
                f"exp({self.c!r}*floor({self.d!r}*n^{1.0 - self.r!r})^{power!r}"
                f"/{self.d!r}^{power!r})"
            )
        return f"exp({self.c!r}*exp({self.gamma!r}*floor(log(n)/{self.gamma!r})))"


class SumClassification(BaseModel):
    """Ветка классификатора функции φ с обосновывающими величинами."""

    branch: DimensionBranch
    parameters: Dict[str, float] = Field(default_factory=dict)
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)


GrowthProfile.model_rebuild()
