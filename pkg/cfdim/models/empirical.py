"""
Модели переборных оракулов и эмпирических оценок размерности.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from pydantic import Field, model_validator

from .base import BaseModel
from .pressure import PressureMethod


class CoverScheme(str, Enum):
    """Схема канторова покрытия."""

    NATURAL = "natural"
    BLOCK = "block"


class LemmaMode(str, Enum):
    """Режим проверки неравенства для полос: все цифры или цифры до M."""

    FULL = "full"
    RESTRICTED = "restricted"


class DyadicBandCount(BaseModel):
    """Число слов глубины k с 2^{-m} ≤ |I_k| < 2^{-(m-1)} по полосам m."""

    k: int = Field(..., ge=1)
    digit_cap: Optional[int] = Field(None, ge=1)
    m_max: int = Field(..., ge=1)
    table: Dict[int, int] = Field(default_factory=dict)
    nodes: int = Field(0, ge=0, description="Посещённые узлы дерева перебора")

    @model_validator(mode="after")
    def _check_counts(self):
        if any(count < 0 for count in self.table.values()):
            raise ValueError("Отрицательное число слов в полосе")
        return self

    @property
    def total(self) -> int:
        return sum(self.table.values())

    def count(self, m: int) -> int:
        return self.table.get(m, 0)


class CoverLevel(BaseModel):
    """Статистики уровня k канторова покрытия (точные значения и их логарифмы)."""

    level: int = Field(..., ge=1)
    children_per_parent: Optional[int] = Field(None, ge=1, description="m_k, если вычислено точно")
    min_gap: Optional[Fraction] = None
    max_diameter: Optional[Fraction] = None
    total_count: Optional[int] = Field(None, ge=1, description="♯E_k, если вычислено точно")
    log_min_gap: float
    log_max_diameter: float
    log_children: float
    log_total_count: float
    depth: int = Field(..., ge=0, description="Длина слов уровня")


class ConstructionParams(BaseModel):
    """
    Параметры блочной конструкции: длина блока k_0, полоса m_0 и разложения
    n_k - n_{k-1} - 1 = ℓ_k·k_0 + r_k.
    """

    k_0: int = Field(..., ge=1)
    m_0: int = Field(..., ge=1)
    decomposition: List[Tuple[int, int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_decomposition(self):
        for blocks, rest in self.decomposition:
            if blocks < 0 or not 0 <= rest < self.k_0:
                raise ValueError(f"Некорректное разложение (ℓ={blocks}, r={rest}) при k_0={self.k_0}")
        return self

    @classmethod
    def decompose(cls, positions: List[int], k_0: int, m_0: int) -> "ConstructionParams":
        """Разложить промежутки между позициями n_k на блоки длины k_0."""
        pairs = []
        previous = 0
        for position in positions:
            gap = position - previous - 1
            if gap < 0:
                raise ValueError(f"Позиции не возрастают: {previous} → {position}")
            pairs.append(divmod(gap, k_0))
            previous = position
        return cls(k_0=k_0, m_0=m_0, decomposition=pairs)


class EstimateTrace(BaseModel):
    """Поуровневые оценки размерности, нижний предел по ходу и итог."""

    name: str
    levels: List[int] = Field(default_factory=list)
    values: List[float] = Field(default_factory=list)
    running_liminf: List[float] = Field(default_factory=list)
    final: float
    warnings: List[str] = Field(default_factory=list)


class LemmaNPReport(BaseModel):
    """Результат поиска полосы m, в которой слов достаточно много."""

    theta: float
    eps: float
    k: int
    mode: LemmaMode
    digit_cap: Optional[int] = None
    found: bool
    m: Optional[int] = None
    m_max: Optional[int] = Field(None, description="Последняя просмотренная полоса")
    pressure_bound: float = Field(..., description="Оценка давления в пороге")
    pressure_certified: bool = True
    above_dimension: bool = Field(False, description="P_M(θ) < 0, то есть θ > dim F_M")
    best_m: Optional[int] = None
    best_log_ratio: float = Field(..., description="max_m log(N_m / порог)")
    predicted_m: Optional[int] = Field(None, description="Полоса, где тренд запаса пересекает ноль")
    budget_exhausted: bool = False
    table: Dict[int, int] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)


class WangWuBracket(BaseModel):
    """Скобка для s_n(B) = inf{ρ: f_n(ρ, B) < 1}."""

    B: float
    n: int
    digit_truncation: int
    lower: float
    upper: float
    tail_bound: float
    evaluations: int = 0
    method: PressureMethod = PressureMethod.OPERATOR_ITERATION
    certified: bool = Field(False, description="True для перебора со строгой оценкой хвоста")

    @model_validator(mode="after")
    def _check_order(self):
        if self.lower > self.upper:
            raise ValueError(f"lower={self.lower} > upper={self.upper}")
        return self

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)


class BoxCountResult(BaseModel):
    """Наклон log N(δ) против -log δ по выборке точек."""

    slope: float
    intercept: float
    scales: List[float]
    counts: List[int]
    points: int
    depth: int
    seed: int


class StoppingCoverResult(BaseModel):
    """Число минимальных цилиндров длины < 2^{-m} и оценки по наклонам."""

    digit_cap: int
    m_values: List[int]
    counts: List[int]
    slopes: List[float]
    estimate: float
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
