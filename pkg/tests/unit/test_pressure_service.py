"""
Тесты сертифицированных скобок давления.
"""

import math

import pytest

from cfdim.models.pressure import BracketKind, PressureBracket, PressureMethod, PressureQuery
from cfdim.services.pressure_service import (
    PressureCurve,
    PressureService,
    RefineBudget,
    enumerate_log_sum,
    tail_delta,
)
from cfdim.services.transfer_operator import TransferOperator
from cfdim.utils.error_handling import BudgetError, DomainError


GOLDEN_LOG = math.log((1 + math.sqrt(5)) / 2)


@pytest.mark.unit
class TestEnumerateLogSum:
    """Тесты перебора сумм Σ q_n^{-2θ}."""

    def test_single_digit_sum(self):
        """Тест: n=1, M=3, θ=1 даёт log(1 + 1/4 + 1/9)."""
        value = enumerate_log_sum(1.0, 3, 1)
        assert value == pytest.approx(math.log(1 + 1 / 4 + 1 / 9), abs=1e-14)

    def test_fibonacci_closed_form(self):
        """Тест: при M=1 единственное слово имеет q_n = F_{n+1}."""
        fib = [1, 1]
        for _ in range(12):
            fib.append(fib[-1] + fib[-2])
        value = enumerate_log_sum(0.8, 1, 12)
        assert value == pytest.approx(-1.6 * math.log(fib[12]), rel=1e-12)

    def test_budget_exceeded(self):
        """Тест: превышение лимита слов даёт BudgetError."""
        with pytest.raises(BudgetError):
            enumerate_log_sum(1.0, 10, 10, cap=1000)

    def test_threads_do_not_change_result(self):
        """Тест: параллельный перебор даёт тот же результат."""
        single = enumerate_log_sum(0.7, 3, 13, threads=1)
        parallel = enumerate_log_sum(0.7, 3, 13, threads=4)
        assert single == pytest.approx(parallel, abs=1e-12)


@pytest.mark.unit
class TestTailDelta:
    """Тесты оценки хвоста δ_M(θ)."""

    def test_theta_one_cap_hundred(self):
        """Тест: δ_100(1) ≤ 0.04."""
        assert tail_delta(1.0, 100) <= 0.04

    def test_decreases_with_cap(self):
        """Тест: хвост убывает с ростом M."""
        assert tail_delta(0.8, 200) < tail_delta(0.8, 50)

    def test_divergent_series_rejected(self):
        """Тест: при θ ≤ 1/2 ряд расходится."""
        with pytest.raises(DomainError):
            tail_delta(0.5, 10)


@pytest.mark.unit
class TestRestrictedPressure:
    """Тесты скобок P_M(θ)."""

    @pytest.mark.parametrize("theta", [0.6, 0.8, 1.0])
    def test_fibonacci_bracket(self, pressure_service: PressureService, theta):
        """Тест: скобка P_1(θ) содержит -2θ log φ."""
        bracket = pressure_service.pressure_restricted(theta, 1, 16)
        assert bracket.kind == BracketKind.RESTRICTED
        assert bracket.contains(-2 * theta * GOLDEN_LOG)

    def test_bracket_width(self, pressure_service: PressureService):
        """Тест: ширина скобки равна 2θ log 2 / n."""
        bracket = pressure_service.pressure_restricted(0.7, 2, 10)
        assert bracket.width == pytest.approx(2 * 0.7 * math.log(2) / 10, rel=1e-12)

    @pytest.mark.parametrize("cap,depth", [(2, 8), (3, 6), (4, 8)])
    def test_operator_matches_enumeration(self, cap, depth):
        """Тест: итерация оператора совпадает с перебором."""
        service = PressureService(grid_size=512)
        exact = service.restricted_log_sum(0.75, cap, depth, PressureMethod.ENUMERATE)
        approx = service.restricted_log_sum(0.75, cap, depth, PressureMethod.OPERATOR_ITERATION)
        assert approx == pytest.approx(exact, abs=1e-6)

    def test_cache_returns_same_bracket(self, pressure_service: PressureService):
        """Тест: повторный запрос берётся из кэша."""
        first = pressure_service.pressure_restricted(0.9, 2, 8)
        second = pressure_service.pressure_restricted(0.9, 2, 8)
        assert first is second

    def test_invalid_arguments(self, pressure_service: PressureService):
        """Тест: неположительные θ и n отклоняются."""
        with pytest.raises(DomainError):
            pressure_service.pressure_restricted(0.0, 2, 8)
        with pytest.raises(DomainError):
            pressure_service.pressure_restricted(0.7, 2, 0)


@pytest.mark.unit
class TestFullPressure:
    """Тесты скобок полного давления P(θ)."""

    def test_theta_one_contains_zero(self, pressure_service: PressureService):
        """Тест: P(1) = 0 лежит в скобке при M=100, n=14."""
        bracket = pressure_service.pressure_full(1.0, 100, 14)
        assert bracket.kind == BracketKind.FULL
        assert bracket.contains(0.0)
        assert bracket.tail > 0

    def test_unbounded_contains_zero(self, pressure_service: PressureService):
        """Тест: оценка по всему алфавиту содержит P(1) = 0 без допуска."""
        bracket = pressure_service.pressure_full(1.0, None, 32)
        assert bracket.digit_cap is None
        assert bracket.contains(0.0)
        assert bracket.lower < 0.0 < bracket.upper

    def test_unbounded_not_certified(self, pressure_service: PressureService):
        """Тест: скобка по всему алфавиту без хвоста δ_M помечена как оценка."""
        estimate = pressure_service.pressure_unbounded(0.8, 16)
        assert estimate.kind == BracketKind.FULL
        assert estimate.certified is False
        certified = pressure_service.pressure_full(0.8, 64, 16)
        assert certified.certified
        assert certified.digit_cap == 64
        assert certified.tail > 0

    def test_certified_full_requires_finite_cap(self):
        """Тест: сертифицированная скобка P(θ) без M и хвоста не создаётся."""
        with pytest.raises(ValueError):
            PressureBracket(
                theta=0.8, lower=0.1, upper=0.2, kind=BracketKind.FULL,
                digit_cap=None, depth=8, method=PressureMethod.OPERATOR_ITERATION,
            )

    @pytest.mark.parametrize("digit_cap,depth", [(64, 16), (None, 64)])
    def test_monotone_sweep(self, pressure_service: PressureService, digit_cap, depth):
        """Тест: при θ < θ' нижний конец P(θ) не ниже верхнего конца P(θ') за вычетом ширин."""
        thetas = [0.6, 0.7, 0.8, 0.9, 1.0]
        brackets = [pressure_service.pressure_full(theta, digit_cap, depth) for theta in thetas]
        for left, right in zip(brackets, brackets[1:]):
            assert left.lower >= right.upper - left.width - right.width
            assert left.midpoint > right.midpoint

    def test_singularity_guard(self, pressure_service: PressureService):
        """Тест: θ вблизи 1/2 отклоняется."""
        with pytest.raises(DomainError):
            pressure_service.pressure_full(0.501, 10, 8)

    def test_enumeration_for_unbounded_rejected(self, pressure_service: PressureService):
        """Тест: перебор по бесконечному алфавиту невозможен."""
        with pytest.raises(DomainError):
            pressure_service.pressure_full(0.8, None, 8, PressureMethod.ENUMERATE)

    def test_unbounded_requires_theta_above_half(self, pressure_service: PressureService):
        """Тест: pressure_unbounded требует θ > 1/2."""
        with pytest.raises(DomainError):
            pressure_service.pressure_unbounded(0.5, 8)

    def test_decreasing_in_theta(self, pressure_service: PressureService):
        """Тест: P убывает по θ."""
        low = pressure_service.pressure_full(0.7, None, 64)
        high = pressure_service.pressure_full(0.9, None, 64)
        assert high.upper < low.lower


@pytest.mark.unit
class TestRefine:
    """Тесты адаптивного уточнения."""

    @pytest.mark.slow
    def test_refine_theta_one(self, pressure_service: PressureService):
        """Тест: уточнение P(1) до ширины 0.02 содержит 0."""
        bracket = pressure_service.pressure_refine(1.0, 0.02)
        assert bracket.contains(0.0)
        assert bracket.width <= 0.02
        assert bracket.certified
        assert bracket.digit_cap is not None

    def test_budget_exhaustion_returns_best(self, pressure_service: PressureService):
        """Тест: при исчерпании бюджета возвращается лучшая скобка с converged=False."""
        budget = RefineBudget(max_steps=1, start_cap=4, start_depth=4)
        bracket = pressure_service.pressure_refine(1.0, 1e-6, budget)
        assert bracket.converged is False
        assert bracket.contains(0.0)

    def test_nonpositive_tolerance(self, pressure_service: PressureService):
        """Тест: tol ≤ 0 отклоняется."""
        with pytest.raises(DomainError):
            pressure_service.pressure_refine(1.0, 0.0)


@pytest.mark.unit
class TestEstimates:
    """Тесты быстрых оценок и кривой давления."""

    def test_estimate_near_zero_at_one(self, pressure_service: PressureService):
        """Тест: оценка P(1) близка к нулю."""
        assert abs(pressure_service.pressure_estimate(1.0)) < 1e-4

    def test_restricted_estimate_at_zero(self, pressure_service: PressureService):
        """Тест: P_M(0) = log M."""
        assert pressure_service.pressure_estimate(1e-9, 3) == pytest.approx(math.log(3), abs=1e-6)

    def test_curve_matches_estimates(self, pressure_service: PressureService):
        """Тест: сплайн кривой совпадает с прямой оценкой."""
        curve = PressureCurve(pressure_service, 2, points=60)
        direct = pressure_service.pressure_estimate(0.6, 2)
        assert curve(0.6) == pytest.approx(direct, abs=1e-5)

    def test_curve_range_checked(self, pressure_service: PressureService):
        """Тест: точка вне диапазона кривой отклоняется."""
        curve = PressureCurve(pressure_service, 2, points=20)
        with pytest.raises(DomainError):
            curve(2.0)

    def test_operator_rejects_bad_order(self):
        """Тест: допустимы только порядки интерполяции 1 и 3."""
        with pytest.raises(DomainError):
            TransferOperator(0.8, 3, grid_size=32, interpolation_order=2)


@pytest.mark.unit
class TestPressureQuery:
    """Тесты модели запроса давления."""

    def test_restricted_allows_small_theta(self):
        """Тест: для P_M допустимо θ ≤ 1/2."""
        query = PressureQuery(theta=0.3, digit_cap=2, depth=8)
        assert not query.unbounded
        assert query.method == PressureMethod.ENUMERATE

    @pytest.mark.parametrize("theta", [0.4, 0.5, 0.503])
    def test_unbounded_near_singularity(self, theta):
        """Тест: для P(θ) θ обязано отстоять от 1/2 больше чем на отступ."""
        with pytest.raises(ValueError):
            PressureQuery(theta=theta, depth=8)

    def test_nonpositive_theta(self):
        """Тест: θ ≤ 0 отклоняется и при ограниченном алфавите."""
        with pytest.raises(ValueError):
            PressureQuery(theta=0.0, digit_cap=2, depth=8)
