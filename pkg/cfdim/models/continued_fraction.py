"""
Значения цепных дробей: слова из цифр, континуанты, цилиндры, статистики орбиты.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Tuple, Union


@dataclass(frozen=True)
class DigitWord:
    """Конечное слово из цифр a_1..a_n (все цифры ≥ 1)."""

    digits: Tuple[int, ...] = ()

    def __post_init__(self):
        digits = tuple(self.digits)
        for a in digits:
            if isinstance(a, bool) or not isinstance(a, int) or a < 1:
                raise ValueError(f"Цифра цепной дроби должна быть натуральной: {a!r}")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def of(cls, *digits: int) -> "DigitWord":
        return cls(tuple(digits))

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return DigitWord(self.digits[index])
        return self.digits[index]

    def __add__(self, other: Union["DigitWord", Tuple[int, ...]]) -> "DigitWord":
        other_digits = other.digits if isinstance(other, DigitWord) else tuple(other)
        return DigitWord(self.digits + other_digits)

    def append(self, digit: int) -> "DigitWord":
        return DigitWord(self.digits + (digit,))

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.digits) + "]"


@dataclass(frozen=True)
class ContinuantQuad:
    """Знаменатели и числители двух последних подходящих дробей."""

    q_prev: int
    q_cur: int
    p_prev: int
    p_cur: int

    def extend(self, digit: int) -> "ContinuantQuad":
        """Один шаг рекурсии q_n = a_n q_{n-1} + q_{n-2}."""
        return ContinuantQuad(
            q_prev=self.q_cur,
            q_cur=digit * self.q_cur + self.q_prev,
            p_prev=self.p_cur,
            p_cur=digit * self.p_cur + self.p_prev,
        )

    @property
    def determinant(self) -> int:
        return self.p_cur * self.q_prev - self.p_prev * self.q_cur


# q_{-1}=0, q_0=1, p_{-1}=1, p_0=0
SEED_QUAD = ContinuantQuad(q_prev=0, q_cur=1, p_prev=1, p_cur=0)


@dataclass(frozen=True)
class CylinderInterval:
    """Цилиндр I_n(w) с точными рациональными концами."""

    word: DigitWord
    lo: Fraction
    hi: Fraction
    length: Fraction

    def contains(self, other: "CylinderInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


@dataclass(frozen=True)
class OrbitStats:
    """S_n (сумма цифр), M_n (максимум), Π_n^{(m)} (произведение цифр > e^m)."""

    length: int
    partial_sum: int
    maximum: int
    large_product: int
    threshold_exponent: int = 0
    prefix_sums: Tuple[int, ...] = field(default=(), repr=False)
    prefix_maxima: Tuple[int, ...] = field(default=(), repr=False)
