"""
Точная арифметика цепных дробей.

Зона ответственности:
- Разложение числа из (0,1) в цепную дробь (отображение Гаусса)
- Континуанты q_n, p_n и закон склейки слов
- Цилиндры I_n(a_1..a_n) с точными рациональными концами
- Статистики орбиты S_n, M_n, Π_n^{(m)}
- Хвостовые и головные объединения подцилиндров (зазоры покрытий)
"""

import math
import numbers
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import mpmath

from cfdim.models.continued_fraction import (
    SEED_QUAD,
    ContinuantQuad,
    CylinderInterval,
    DigitWord,
    OrbitStats,
)
from cfdim.utils.error_handling import DomainError


Word = Union[DigitWord, Sequence[int]]

DEFAULT_EXPANSION_EPS = 1e-15


def as_word(w: Word) -> DigitWord:
    """Привести последовательность цифр к DigitWord."""
    if isinstance(w, DigitWord):
        return w
    return DigitWord(tuple(w))


def gauss_expand(
    x: Union[float, numbers.Rational],
    n: int,
    eps: float = DEFAULT_EXPANSION_EPS,
) -> Tuple[DigitWord, bool]:
    """
    Первые n цифр x через отображение Гаусса T(x) = 1/x - ⌊1/x⌋.

    Рациональные входы раскладываются точно (алгоритм Евклида), для float
    разложение останавливается, когда остаток меньше eps.

    Args:
        x: число из (0, 1)
        n: число цифр
        eps: порог остатка для float

    Returns:
        (слово, флаг завершения орбиты в нуле)

    Raises:
        DomainError: если x вне (0, 1) или n < 1
    """
    if n < 1:
        raise DomainError(f"n={n} должно быть не меньше 1")

    if isinstance(x, numbers.Rational):
        r = Fraction(x.numerator, x.denominator)
        if not (0 < r < 1):
            raise DomainError(f"x={x} вне интервала (0, 1)")
        digits = []
        while len(digits) < n:
            inv = 1 / r
            a = inv.numerator // inv.denominator
            digits.append(a)
            r = inv - a
            if r == 0:
                return DigitWord(tuple(digits)), True
        return DigitWord(tuple(digits)), False

    value = float(x)
    if not (0.0 < value < 1.0) or math.isnan(value):
        raise DomainError(f"x={x} вне интервала (0, 1)")
    digits = []
    r = value
    while len(digits) < n:
        inv = 1.0 / r
        a = int(math.floor(inv))
        digits.append(a)
        r = inv - a
        if r < eps:
            return DigitWord(tuple(digits)), True
    return DigitWord(tuple(digits)), False


def continuants(w: Word) -> ContinuantQuad:
    """q_n, q_{n-1}, p_n, p_{n-1} для слова (q_{-1}=0, q_0=1, p_{-1}=1, p_0=0)."""
    quad = SEED_QUAD
    for a in as_word(w):
        quad = quad.extend(a)
    return quad


def continuant(digits: Iterable[int]) -> int:
    """Только q_n(a_1..a_n)."""
    q_prev, q_cur = 0, 1
    for a in digits:
        q_prev, q_cur = q_cur, a * q_cur + q_prev
    return q_cur


def log_continuant(digits: Iterable[float]) -> float:
    """log q_n в плавающей арифметике, устойчиво для длинных слов."""
    log_q = 0.0
    ratio = 0.0  # q_{n-1}/q_n
    for a in digits:
        log_q += math.log(a + ratio)
        ratio = 1.0 / (a + ratio)
    return log_q


def continuants_concat(u: Word, v: Word) -> int:
    """
    q_{n+k}(u*v) по закону склейки.

    q_{n+k}(uv) = q_n(u) q_k(v) + q_{n-1}(u) q_{k-1}(v без первой цифры)
    """
    u, v = as_word(u), as_word(v)
    qu = continuants(u)
    if len(v) == 0:
        return qu.q_cur
    return qu.q_cur * continuant(v) + qu.q_prev * continuant(v.digits[1:])


def cylinder(w: Word) -> CylinderInterval:
    """
    Цилиндр I_n(w) с концами p_n/q_n и (p_n+p_{n-1})/(q_n+q_{n-1}).

    Пустое слово даёт единичный интервал длины 1.
    """
    word = as_word(w)
    if len(word) == 0:
        return CylinderInterval(word=word, lo=Fraction(0), hi=Fraction(1), length=Fraction(1))
    quad = continuants(word)
    a = Fraction(quad.p_cur, quad.q_cur)
    b = Fraction(quad.p_cur + quad.p_prev, quad.q_cur + quad.q_prev)
    lo, hi = (a, b) if a <= b else (b, a)
    length = Fraction(1, quad.q_cur * (quad.q_cur + quad.q_prev))
    return CylinderInterval(word=word, lo=lo, hi=hi, length=length)


def cylinder_length(w: Word) -> Fraction:
    """|I_n(w)| = 1/(q_n(q_n+q_{n-1}))."""
    quad = continuants(w)
    return Fraction(1, quad.q_cur * (quad.q_cur + quad.q_prev))


def tail_length(quad: ContinuantQuad, bound: int) -> Fraction:
    """Длина объединения подцилиндров I(w, a) с a > bound."""
    q, q_prev = quad.q_cur, quad.q_prev
    return Fraction(1, q * ((bound + 1) * q + q_prev))


def head_length(quad: ContinuantQuad, lowest: int) -> Fraction:
    """Длина объединения подцилиндров I(w, a) с a < lowest."""
    if lowest <= 1:
        return Fraction(0)
    q, q_prev = quad.q_cur, quad.q_prev
    return Fraction(lowest - 1, (q + q_prev) * (lowest * q + q_prev))


def partition_defect(w: Word, bound: int) -> Fraction:
    """
    Σ_{a≤bound} |I(w,a)| + |хвост за bound| - |I(w)|; ноль для любого слова.
    """
    word = as_word(w)
    quad = continuants(word)
    total = sum(
        (Fraction(1, q * (q + quad.q_cur)) for q in (a * quad.q_cur + quad.q_prev for a in range(1, bound + 1))),
        Fraction(0),
    )
    parent = Fraction(1, quad.q_cur * (quad.q_cur + quad.q_prev)) if len(word) else Fraction(1)
    return total + tail_length(quad, bound) - parent


def distortion_ratio(u: Word, v: Word) -> Fraction:
    """|I(u*v)| / (|I(u)|·|I(v)|), лежит в [1/2, 2]."""
    u, v = as_word(u), as_word(v)
    return cylinder_length(u + v) / (cylinder_length(u) * cylinder_length(v))


def delete_digit(w: Word, k: int) -> DigitWord:
    """Слово без k-й цифры (нумерация с 1)."""
    word = as_word(w)
    if not 1 <= k <= len(word):
        raise DomainError(f"Позиция {k} вне слова длины {len(word)}")
    return DigitWord(word.digits[: k - 1] + word.digits[k:])


def exp_floor(m: int) -> int:
    """⌊e^m⌋ точно (e^m иррационально при m ≥ 1)."""
    if m < 0:
        raise DomainError(f"Порог m={m} должен быть неотрицательным")
    if m == 0:
        return 1
    with mpmath.workdps(int(m / 2.3) + 30):
        return int(mpmath.floor(mpmath.exp(m)))


def orbit_stats(w: Word, m: int = 0) -> OrbitStats:
    """
    S_n, M_n и произведение цифр, превосходящих e^m.

    Args:
        w: слово
        m: показатель порога e^m

    Returns:
        OrbitStats с префиксными суммами и максимумами
    """
    word = as_word(w)
    threshold = exp_floor(m)
    sums, maxima = [], []
    total, top, product = 0, 0, 1
    for a in word:
        total += a
        top = max(top, a)
        if a > threshold:
            product *= a
        sums.append(total)
        maxima.append(top)
    return OrbitStats(
        length=len(word),
        partial_sum=total,
        maximum=top,
        large_product=product,
        threshold_exponent=m,
        prefix_sums=tuple(sums),
        prefix_maxima=tuple(maxima),
    )
