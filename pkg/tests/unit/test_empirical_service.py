"""
Тесты переборных оракулов и эмпирических оценок размерности.
"""

import math
from fractions import Fraction

import pytest
from scipy.special import zeta

from cfdim.models.empirical import ConstructionParams, CoverScheme, DyadicBandCount, LemmaMode
from cfdim.models.pressure import BracketKind, PressureBracket, PressureMethod
from cfdim.models.profile import SequenceTriple
from cfdim.services.empirical_service import EmpiricalService
from cfdim.utils.error_handling import BudgetError, DegenerateError, DomainError


THETA_2 = 0.5312805


@pytest.mark.unit
class TestBandCounts:
    """Тесты подсчёта слов по двоичным полосам."""

    def test_two_letters_depth_two(self, empirical_service: EmpiricalService):
        """Тест: слова 11, 12, 21, 22 попадают в полосы 3, 4, 4, 6."""
        bands = empirical_service.band_counts(2, digit_cap=2)
        assert bands.table == {3: 1, 4: 2, 6: 1}
        assert bands.total == 4

    def test_total_equals_words(self, empirical_service: EmpiricalService):
        """Тест: при m_max по умолчанию учтены все M^k слов."""
        bands = empirical_service.band_counts(5, digit_cap=3)
        assert bands.total == 3**5

    def test_single_digit_words(self, empirical_service: EmpiricalService):
        """Тест: k = 1, полоса m: цифры a с a(a+1) в (2^{m-1}, 2^m]."""
        bands = empirical_service.band_counts(1, m_max=6)
        # a(a+1): 2, 6, 12, 20, 30, 42, 56
        assert bands.table == {1: 1, 3: 1, 4: 1, 5: 2, 6: 2}

    def test_threads_match_single(self, pressure_service):
        """Тест: параллельный перебор даёт ту же таблицу."""
        single = EmpiricalService(pressure_service, threads=1).band_counts(6, m_max=20)
        parallel = EmpiricalService(pressure_service, threads=4).band_counts(6, m_max=20)
        assert single.table == parallel.table

    def test_unbounded_needs_m_max(self, empirical_service: EmpiricalService):
        """Тест: без M и m_max перебор бесконечен."""
        with pytest.raises(DomainError):
            empirical_service.band_counts(3)

    def test_node_budget(self, pressure_service):
        """Тест: превышение лимита узлов даёт BudgetError."""
        service = EmpiricalService(pressure_service, node_cap=10)
        with pytest.raises(BudgetError):
            service.band_counts(6, digit_cap=5)


@pytest.mark.unit
class TestLemmaBands:
    """Тесты поиска полосы с большим числом слов."""

    def test_restricted_small_theta_found(self, empirical_service: EmpiricalService):
        """Тест: M = 2, θ = 0.25, k = 12: полоса находится."""
        report = empirical_service.verify_lemma_np(0.25, 0.0, 12, LemmaMode.RESTRICTED, digit_cap=2)
        assert report.found
        assert report.table[report.m] > 2 ** ((report.m + 1) * 0.25)

    def test_restricted_large_theta_not_found(self, empirical_service: EmpiricalService):
        """Тест: M = 2, θ = 0.9, k = 10: полосы нет, отчёт без исключения."""
        report = empirical_service.verify_lemma_np(0.9, 0.0, 10, LemmaMode.RESTRICTED, digit_cap=2)
        assert not report.found
        assert report.m is None
        assert report.best_log_ratio < 0
        assert report.above_dimension
        assert report.pressure_bound < 0

    def test_restricted_below_dimension(self, empirical_service: EmpiricalService):
        """Тест: M = 2, θ = 0.4 < dim F_2: при k = 10 полосы ещё нет."""
        report = empirical_service.verify_lemma_np(0.4, 0.0, 10, LemmaMode.RESTRICTED, digit_cap=2)
        assert not report.above_dimension
        assert report.pressure_bound > 0
        assert not report.found

    @pytest.mark.slow
    def test_restricted_band_appears_with_depth(self, empirical_service: EmpiricalService):
        """Тест: M = 2, θ = 0.4: при k = 20 полоса находится, m = 34."""
        report = empirical_service.verify_lemma_np(0.4, 0.0, 20, LemmaMode.RESTRICTED, digit_cap=2)
        assert report.found
        assert report.m == 34

    def test_restricted_needs_cap(self, empirical_service: EmpiricalService):
        """Тест: режим restricted без M отклоняется."""
        with pytest.raises(DomainError):
            empirical_service.verify_lemma_np(0.5, 0.0, 4, LemmaMode.RESTRICTED)

    def test_full_mode_guards(self, empirical_service: EmpiricalService):
        """Тест: θ вне (1/2, 1) и слишком большое ε отклоняются."""
        with pytest.raises(DomainError):
            empirical_service.verify_lemma_np(0.4, 0.1, 4)
        with pytest.raises(DomainError):
            empirical_service.verify_lemma_np(0.8, 10.0, 4)

    @staticmethod
    def _trend_bands(offset: float, theta: float):
        """Таблицы полос с запасом 0.5(m - 30.5) над порогом."""

        def fake(k, m_max, digit_cap):
            table = {
                m: round(math.exp((m + 1) * theta * math.log(2) + offset + 0.5 * (m - 30.5)))
                for m in range(10, m_max + 1)
            }
            return DyadicBandCount(k=k, digit_cap=digit_cap, m_max=m_max, table=table, nodes=len(table))

        return fake

    @pytest.fixture
    def fixed_pressure(self, empirical_service: EmpiricalService, mocker):
        """Скобка P(0.6) = [1.0, 1.2] с малым хвостом."""
        bracket = PressureBracket(
            theta=0.6, lower=1.0, upper=1.2, kind=BracketKind.FULL, digit_cap=1024, depth=64,
            method=PressureMethod.OPERATOR_ITERATION, tail=0.05,
        )
        return mocker.patch.object(empirical_service.pressure, "pressure_full", return_value=bracket)

    def test_full_mode_extends_m_max(self, empirical_service: EmpiricalService, fixed_pressure, mocker):
        """Тест: без полосы до 3k граница продлевается по тренду запаса."""
        bands = mocker.patch.object(
            empirical_service, "band_counts", side_effect=self._trend_bands((1.2 - 0.1) * 8, 0.6)
        )
        report = empirical_service.verify_lemma_np(0.6, 0.1, 8)
        assert [call.args for call in bands.call_args_list] == [(8, 24, None), (8, 33, None)]
        assert report.found
        assert report.m == 31
        assert report.m_max == 33
        assert report.pressure_certified
        assert report.predicted_m is None

    def test_full_mode_extension_budget(self, empirical_service: EmpiricalService, fixed_pressure, mocker):
        """Тест: исчерпание лимита узлов при продлении возвращается отчётом с прогнозом."""
        fake = self._trend_bands((1.2 - 0.1) * 8, 0.6)
        mocker.patch.object(
            empirical_service, "band_counts", side_effect=[fake(8, 24, None), BudgetError("лимит узлов")]
        )
        report = empirical_service.verify_lemma_np(0.6, 0.1, 8)
        assert not report.found
        assert report.budget_exhausted
        assert report.predicted_m == 31
        assert report.m_max == 24
        assert report.best_m == 24
        assert report.best_log_ratio == pytest.approx(-3.25, abs=1e-3)
        assert report.notes


@pytest.mark.unit
class TestCovers:
    """Тесты канторовых покрытий."""

    def test_bounded_cover_exact(self, empirical_service: EmpiricalService):
        """Тест: уровень 1 покрытия F_2: зазор 1/14, диаметр 1/2."""
        levels = empirical_service.bounded_cover(2, 3)
        first = levels[0]
        assert first.total_count == 2
        assert first.max_diameter == Fraction(1, 2)
        assert first.min_gap == Fraction(1, 14)
        assert levels[-1].total_count == 8

    def test_bounded_cover_degenerate(self, empirical_service: EmpiricalService):
        """Тест: F_1 не даёт канторова покрытия."""
        with pytest.raises(DegenerateError):
            empirical_service.bounded_cover(1, 4)

    def test_natural_cover_estimates(self, empirical_service: EmpiricalService, exp_square_triple):
        """Тест: n_k = k, s_k = t_k = e^{k²}: оценки близки к 1/2."""
        levels = empirical_service.build_cover(exp_square_triple, 2, 24)
        falconer = empirical_service.falconer_estimate(levels)
        covering = empirical_service.covering_estimate(levels)
        assert abs(falconer.final - 0.5) < 0.1
        assert abs(covering.final - 0.5) < 0.1
        assert falconer.final <= covering.final
        assert not covering.warnings

    def test_block_cover(self, empirical_service: EmpiricalService):
        """Тест: блочная схема на редких позициях n_k = k²."""
        triple = SequenceTriple(n_gen="k^2", s_gen="2^n_k", t_gen="2^n_k")
        levels = empirical_service.build_cover(triple, 2, 3, CoverScheme.BLOCK)
        assert [level.depth for level in levels] == [1, 4, 9]
        gaps = [level.log_min_gap for level in levels]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))

    def test_block_params_discovered(self, empirical_service: EmpiricalService):
        """Тест: подобранная полоса содержит хотя бы два блока."""
        params = empirical_service.discover_block_params(2)
        assert empirical_service.band_counts(params.k_0, None, 2).count(params.m_0) >= 2

    def test_decompose(self):
        """Тест: промежутки между позициями раскладываются на блоки."""
        params = ConstructionParams.decompose([1, 4, 9], k_0=2, m_0=5)
        assert params.decomposition == [(0, 0), (1, 0), (2, 0)]

    def test_degenerate_digits(self, empirical_service: EmpiricalService):
        """Тест: t_k = 1 оставляет одну цифру на позиции."""
        triple = SequenceTriple(n_gen="k", s_gen="3", t_gen="1")
        with pytest.raises(DegenerateError):
            empirical_service.build_cover(triple, 2, 4)

    def test_falconer_needs_levels(self, empirical_service: EmpiricalService):
        """Тест: одного уровня мало для оценки Фалконера."""
        levels = empirical_service.bounded_cover(2, 1)
        with pytest.raises(DomainError):
            empirical_service.falconer_estimate(levels)


@pytest.mark.unit
class TestStoppingCover:
    """Тесты покрытия остановкой по длине."""

    def test_slope_near_theta_2(self, empirical_service: EmpiricalService):
        """Тест: наклон между масштабами 20 и 30 близок к θ_2."""
        result = empirical_service.stopping_cover_counts(2, [20, 30])
        assert result.estimate == pytest.approx(THETA_2, abs=0.05)
        assert result.counts[0] < result.counts[1]

    def test_needs_two_scales(self, empirical_service: EmpiricalService):
        """Тест: одного масштаба недостаточно."""
        with pytest.raises(DomainError):
            empirical_service.stopping_cover_counts(2, [10])


@pytest.mark.unit
class TestWangWu:
    """Тесты скобки s_n(B)."""

    def test_bracket_near_type_one_root(self, empirical_service: EmpiricalService, dimension_service):
        """Тест: s_16(2) не меньше θ(log 2) и близка к нему."""
        bracket = empirical_service.wang_wu_s_n(2.0, 16)
        root = dimension_service.theta_type_one(math.log(2), tol=1e-3)
        assert 0.5 <= bracket.lower <= bracket.upper <= 1.0
        assert bracket.upper >= root.value_lo - 1e-3
        assert bracket.lower <= root.value_hi + 0.05

    def test_invalid_base(self, empirical_service: EmpiricalService):
        """Тест: B ≤ 1 отклоняется."""
        with pytest.raises(DomainError):
            empirical_service.wang_wu_s_n(1.0, 8)

    def test_truncation_too_small(self, empirical_service: EmpiricalService):
        """Тест: слишком малое A даёт большой остаток хвоста."""
        with pytest.raises(DomainError):
            empirical_service.wang_wu_s_n(2.0, 64, digit_truncation=2)

    def test_enumeration_cap(self):
        """Тест: наибольшее M с M^n ≤ 2^20."""
        assert EmpiricalService.wang_wu_enumeration_cap(1) == 1 << 20
        assert EmpiricalService.wang_wu_enumeration_cap(2) == 1024
        assert EmpiricalService.wang_wu_enumeration_cap(4) == 32

    def test_single_digit_exact(self, empirical_service: EmpiricalService):
        """Тест: при n = 1 f_1(ρ, B) = B^{-ρ} ζ(2ρ) лежит между границами перебора."""
        lower, upper = empirical_service.wang_wu_enumerated_log_f(0.8, 2.0, 1, 1000)
        exact = math.log(float(zeta(1.6))) - 0.8 * math.log(2.0)
        assert lower < exact < upper

    @pytest.mark.parametrize("n,rho", [(2, 0.8), (3, 0.75)])
    def test_operator_within_enumeration_bounds(self, empirical_service: EmpiricalService, n, rho):
        """Тест: оператор переноса и перебор с хвостом ζ согласованы."""
        digit_cap = EmpiricalService.wang_wu_enumeration_cap(n)
        lower, upper = empirical_service.wang_wu_enumerated_log_f(rho, 2.0, n, digit_cap)
        value = empirical_service.wang_wu_operator_log_f(rho, 2.0, n)
        assert lower - 1e-5 <= value <= upper + 1e-5

    def test_enumerated_bracket_overlaps_operator(self, empirical_service: EmpiricalService):
        """Тест: строгая скобка s_2(2) перебором пересекается со скобкой оператора."""
        enumerated = empirical_service.wang_wu_enumerated(2.0, 2)
        operator = empirical_service.wang_wu_s_n(2.0, 2)
        assert enumerated.certified
        assert not operator.certified
        assert enumerated.method == PressureMethod.ENUMERATE
        assert 0.5 <= enumerated.lower <= enumerated.upper <= 1.0
        assert enumerated.lower <= operator.upper + 1e-4
        assert operator.lower <= enumerated.upper + 1e-4

    def test_enumeration_depth_limited(self, empirical_service: EmpiricalService):
        """Тест: перебор для s_n доступен только при малых n."""
        with pytest.raises(DomainError):
            empirical_service.wang_wu_enumerated(2.0, 16)


@pytest.mark.unit
class TestBoxCount:
    """Тесты подсчёта ящиков."""

    def test_seed_reproducible(self, empirical_service: EmpiricalService):
        """Тест: одинаковое зерно даёт одинаковые счётчики."""
        first = empirical_service.boxcount_sample(2, count=2000, depth=20)
        second = empirical_service.boxcount_sample(2, count=2000, depth=20)
        assert first.counts == second.counts
        assert first.seed == 7

    @pytest.mark.slow
    def test_slope_near_theta_2(self, empirical_service: EmpiricalService):
        """Тест: наклон для F_2 близок к θ_2."""
        result = empirical_service.boxcount_sample(2, count=100_000, depth=24)
        assert result.slope == pytest.approx(THETA_2, abs=0.1)

    def test_explicit_digits(self, empirical_service: EmpiricalService):
        """Тест: явный набор цифр {1, 3} допустим."""
        result = empirical_service.boxcount_sample([1, 3], count=1000, depth=20)
        assert result.points == 1000
        assert 0 < result.slope < 1

    def test_scale_below_resolution(self, empirical_service: EmpiricalService):
        """Тест: масштаб мельче разрешения отклоняется."""
        with pytest.raises(DomainError):
            empirical_service.boxcount_sample(2, count=100, depth=4, scales=[1e-9, 1e-3])
