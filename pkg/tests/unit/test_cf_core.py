"""
Тесты точной арифметики цепных дробей.
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from cfdim.models.continued_fraction import DigitWord
from cfdim.services.cf_core import (
    continuant,
    continuants,
    continuants_concat,
    cylinder,
    cylinder_length,
    delete_digit,
    distortion_ratio,
    exp_floor,
    gauss_expand,
    head_length,
    log_continuant,
    orbit_stats,
    partition_defect,
    tail_length,
)
from cfdim.utils.error_handling import DomainError


def random_words(count: int, max_len: int, max_digit: int, seed: int = 2024):
    """Детерминированный поток случайных слов."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        length = int(rng.integers(1, max_len + 1))
        yield DigitWord(tuple(int(a) for a in rng.integers(1, max_digit + 1, size=length)))


@pytest.mark.unit
class TestGaussExpand:
    """Тесты разложения в цепную дробь."""

    def test_golden_ratio(self):
        """Тест: (√5-1)/2 раскладывается в единицы."""
        word, terminated = gauss_expand((math.sqrt(5) - 1) / 2, 5)
        assert word.digits == (1, 1, 1, 1, 1)
        assert terminated is False

    def test_half_terminates(self):
        """Тест: 1/2 даёт одну цифру и флаг завершения."""
        word, terminated = gauss_expand(Fraction(1, 2), 5)
        assert word.digits == (2,)
        assert terminated is True

    def test_half_float_terminates(self):
        """Тест: float 0.5 тоже завершается."""
        word, terminated = gauss_expand(0.5, 5)
        assert word.digits == (2,)
        assert terminated is True

    def test_silver_ratio(self):
        """Тест: √2-1 раскладывается в двойки."""
        word, _ = gauss_expand(math.sqrt(2) - 1, 4)
        assert word.digits == (2, 2, 2, 2)

    def test_exact_rational(self):
        """Тест: рациональное число раскладывается точно."""
        word, terminated = gauss_expand(Fraction(13, 30), 10)
        assert word.digits == (2, 3, 4)
        assert terminated is True
        quad = continuants(word)
        assert Fraction(quad.p_cur, quad.q_cur) == Fraction(13, 30)

    @pytest.mark.parametrize("x", [0.0, 1.0, -0.3, 1.5, Fraction(3, 2)])
    def test_domain_error(self, x):
        """Тест: x вне (0,1) даёт доменную ошибку."""
        with pytest.raises(DomainError):
            gauss_expand(x, 3)

    def test_reconstruction_inside_cylinder(self):
        """Тест: x лежит в цилиндре своих первых цифр."""
        x = Fraction(123456, 987654)
        word, _ = gauss_expand(x, 6)
        interval = cylinder(word)
        assert interval.lo <= x <= interval.hi


@pytest.mark.unit
class TestContinuants:
    """Тесты континуант."""

    def test_fibonacci(self):
        """Тест: q_4(1,1,1,1) = 5."""
        assert continuants(DigitWord.of(1, 1, 1, 1)).q_cur == 5

    def test_empty_seed(self):
        """Тест: q_0 = 1 для пустого слова."""
        quad = continuants(DigitWord())
        assert quad.q_cur == 1
        assert quad.q_prev == 0

    def test_two_two(self):
        """Тест: q_2(2,2) = 5."""
        assert continuants((2, 2)).q_cur == 5

    def test_fibonacci_long(self):
        """Тест: q_n(1..1) = F_{n+1} для n до 60."""
        fib = [0, 1]
        for _ in range(70):
            fib.append(fib[-1] + fib[-2])
        for n in range(1, 61):
            assert continuant([1] * n) == fib[n + 1]

    def test_log_continuant(self):
        """Тест: плавающий log q_n совпадает с точным."""
        digits = (3, 1, 4, 1, 5, 9, 2, 6)
        assert log_continuant(digits) == pytest.approx(math.log(continuant(digits)), rel=1e-14)

    def test_product_bounds(self):
        """Тест: a_1⋯a_n ≤ q_n < 2^n a_1⋯a_n."""
        for word in random_words(500, 10, 30, seed=1):
            product = math.prod(word.digits)
            q = continuant(word.digits)
            assert product <= q < 2 ** len(word) * product

    def test_unimodularity(self):
        """Тест: |p_n q_{n-1} - p_{n-1} q_n| = 1."""
        for word in random_words(500, 12, 50, seed=2):
            assert abs(continuants(word).determinant) == 1

    def test_concatenation_law(self):
        """Тест: закон склейки совпадает с прямой рекурсией."""
        words = list(random_words(200, 8, 20, seed=3))
        for u, v in zip(words, words[1:]):
            assert continuants_concat(u, v) == continuant((u + v).digits)


@pytest.mark.unit
class TestCylinder:
    """Тесты цилиндров."""

    def test_digit_one(self):
        """Тест: I(1) = [1/2, 1], длина 1/2."""
        cyl = cylinder((1,))
        assert (cyl.lo, cyl.hi, cyl.length) == (Fraction(1, 2), Fraction(1), Fraction(1, 2))

    def test_digit_two(self):
        """Тест: I(2) = [1/3, 1/2], длина 1/6."""
        cyl = cylinder((2,))
        assert (cyl.lo, cyl.hi, cyl.length) == (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6))

    def test_nested(self):
        """Тест: I(1,1) вложен в I(1) и имеет длину 1/6."""
        child = cylinder((1, 1))
        assert child.length == Fraction(1, 6)
        assert cylinder((1,)).contains(child)

    def test_empty_word_is_unit_interval(self):
        """Тест: пустое слово даёт [0,1]."""
        cyl = cylinder(())
        assert cyl.length == 1 and cyl.lo == 0 and cyl.hi == 1

    def test_length_matches_endpoints(self):
        """Тест: длина равна разности концов и лежит в (1/(2q²), 1/q²)."""
        for word in random_words(300, 8, 40, seed=4):
            cyl = cylinder(word)
            q = continuant(word.digits)
            assert cyl.hi - cyl.lo == cyl.length
            assert Fraction(1, 2 * q * q) <= cyl.length < Fraction(1, q * q)

    def test_children_nested(self):
        """Тест: I(w*a) ⊂ I(w)."""
        for word in random_words(100, 6, 10, seed=5):
            parent = cylinder(word)
            for a in (1, 2, 7, 100):
                assert parent.contains(cylinder(word.append(a)))


@pytest.mark.unit
class TestOrbitStats:
    """Тесты статистик орбиты."""

    def test_basic(self):
        """Тест: (3,1,5), m=0 → S=9, M=5, Π=15."""
        stats = orbit_stats((3, 1, 5), 0)
        assert (stats.partial_sum, stats.maximum, stats.large_product) == (9, 5, 15)

    def test_empty_product(self):
        """Тест: слово из единиц даёт пустое произведение."""
        assert orbit_stats((1, 1, 1), 3).large_product == 1

    def test_threshold_e_squared(self):
        """Тест: порог e² ≈ 7.389 отбирает 10 и 100."""
        assert orbit_stats((10, 2, 100), 2).large_product == 1000

    def test_exp_floor(self):
        """Тест: ⌊e^m⌋ для малых m."""
        assert [exp_floor(m) for m in range(5)] == [1, 2, 7, 20, 54]

    def test_monotone_prefixes(self):
        """Тест: M_n не убывает, S_n строго возрастает, Π не растёт по m."""
        for word in random_words(100, 12, 200, seed=6):
            stats = orbit_stats(word, 0)
            assert all(a <= b for a, b in zip(stats.prefix_maxima, stats.prefix_maxima[1:]))
            assert all(a < b for a, b in zip(stats.prefix_sums, stats.prefix_sums[1:]))
            products = [orbit_stats(word, m).large_product for m in range(6)]
            assert all(a >= b for a, b in zip(products, products[1:]))


@pytest.mark.unit
class TestGeometryInvariants:
    """Инварианты геометрии цилиндров на 10⁴ случайных словах."""

    def test_distortion(self):
        """Тест: |I(uv)|/(|I(u)||I(v)|) ∈ [1/2, 2]."""
        words = list(random_words(10_001, 12, 50, seed=7))
        for u, v in zip(words[::2], words[1::2]):
            ratio = distortion_ratio(u, v)
            assert Fraction(1, 2) <= ratio <= 2

    def test_digit_deletion(self):
        """Тест: q_n(w) > (a_k/2)·q_{n-1}(w без a_k)."""
        rng = np.random.default_rng(8)
        for word in random_words(10_000, 12, 50, seed=8):
            k = int(rng.integers(1, len(word) + 1))
            assert 2 * continuant(word.digits) > word[k - 1] * continuant(delete_digit(word, k).digits)

    def test_separated_digit_ratio(self):
        """Тест: |I_{n+k}| / (|I_1(a_n)|·|I_{n+k-1}(без a_n)|) ∈ [1/8, 8]."""
        rng = np.random.default_rng(9)
        for word in random_words(10_000, 12, 50, seed=9):
            n = int(rng.integers(1, len(word) + 1))
            ratio = cylinder_length(word) / (
                cylinder_length((word[n - 1],)) * cylinder_length(delete_digit(word, n))
            )
            assert Fraction(1, 8) <= ratio <= 8

    def test_partition_identity(self):
        """Тест: подцилиндры до A и хвост за A покрывают I(w) без остатка."""
        rng = np.random.default_rng(10)
        for word in random_words(10_000, 12, 50, seed=10):
            bound = int(rng.integers(1, 12))
            assert partition_defect(word, bound) == 0

    def test_tail_and_head_lengths(self):
        """Тест: хвост и голова совпадают с суммой подцилиндров."""
        word = DigitWord.of(2, 5, 1)
        quad = continuants(word)
        head = sum((cylinder_length(word.append(a)) for a in range(1, 4)), Fraction(0))
        assert head_length(quad, 4) == head
        assert tail_length(quad, 3) == cylinder_length(word) - head
