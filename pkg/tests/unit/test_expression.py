"""
Тесты мини-языка выражений и классификации пределов.
"""

import math

import mpmath
import pytest

from cfdim.models.profile import ExtendedKind
from cfdim.services.expression import (
    CallableGenerator,
    Expression,
    as_generator,
    exact_floor,
    log_positive,
)
from cfdim.services.limits import classify_limit, richardson_limit, to_float
from cfdim.utils.error_handling import DomainError
from cfdim.utils.validation import ValidationError


@pytest.mark.unit
class TestExpression:
    """Тесты разбора и вычисления выражений."""

    def test_power_in_log_scale(self):
        """Тест: 2^(k^2) хранится как log = k² log 2."""
        sign, magnitude = Expression("2^(k^2)").log_eval(k=3)
        assert sign == 1
        assert float(magnitude) == pytest.approx(9 * math.log(2), rel=1e-15)

    def test_tower_not_materialized(self):
        """Тест: exp(e^(k^2)) при k=5 вычисляется без переполнения."""
        _, magnitude = Expression("exp(e^(k^2))").log_eval(k=5)
        assert float(magnitude) == pytest.approx(math.exp(25), rel=1e-12)

    def test_named_constants(self):
        """Тест: пользовательская константа B подставляется."""
        expression = Expression("B^n", {"B": 2})
        assert float(expression.value(n=10)) == pytest.approx(1024.0)

    def test_sequence_variable(self):
        """Тест: s_k может зависеть от n_k."""
        expression = Expression("2^n_k")
        assert float(expression.value(n_k=5, k=2)) == pytest.approx(32.0)

    def test_floor_of_exact_square_root(self):
        """Тест: floor(√16) = 4 несмотря на округление."""
        assert float(Expression("floor(n^(1/2))").value(n=16)) == 4.0
        assert float(Expression("ceil(n/3)").value(n=7)) == 3.0

    def test_subtraction_and_sign(self):
        """Тест: отрицательные значения сохраняют знак."""
        sign, magnitude = Expression("n - 5").log_eval(n=2)
        assert sign == -1
        assert float(magnitude) == pytest.approx(math.log(3))

    def test_log_of_nonpositive(self):
        """Тест: log(n - 5) при n=2 даёт DomainError."""
        with pytest.raises(DomainError):
            Expression("log(n - 5)").log_eval(n=2)

    def test_unknown_name(self):
        """Тест: неизвестное имя отклоняется при разборе."""
        with pytest.raises(ValidationError):
            Expression("x^2")

    def test_syntax_error(self):
        """Тест: синтаксическая ошибка даёт ValidationError."""
        with pytest.raises(ValidationError):
            Expression("2^^k)")

    def test_missing_variable(self):
        """Тест: незаданная переменная даёт DomainError."""
        with pytest.raises(DomainError):
            Expression("k + n").log_eval(k=1)


@pytest.mark.unit
class TestGenerators:
    """Тесты приведения к генераторам."""

    def test_number_becomes_expression(self):
        """Тест: число превращается в константное выражение."""
        generator = as_generator(3)
        assert isinstance(generator, Expression)
        assert float(generator.value(n=1)) == 3.0

    def test_callable_generator(self):
        """Тест: функция Python оборачивается в CallableGenerator."""
        generator = as_generator(lambda n: n**2 + 1)
        assert isinstance(generator, CallableGenerator)
        assert float(log_positive(generator, n=3)) == pytest.approx(math.log(10))

    def test_log_scale_callable(self):
        """Тест: log_scale=True интерпретирует результат как log f."""
        generator = CallableGenerator(lambda n: n * 1000, log_scale=True)
        assert float(log_positive(generator, n=2)) == pytest.approx(2000.0)

    def test_infinite_constant_rejected(self):
        """Тест: бесконечная константа не является генератором."""
        with pytest.raises(ValidationError):
            as_generator(math.inf)

    def test_exact_floor_near_integer(self):
        """Тест: значение чуть меньше целого округляется к нему."""
        with mpmath.workdps(50):
            x = mpmath.mpf(4) - mpmath.mpf(10) ** -45
            assert exact_floor(x) == 4
            assert exact_floor(mpmath.mpf("3.5")) == 3


@pytest.mark.unit
class TestClassifyLimit:
    """Тесты классификации пределов по следам."""

    def test_zero_limit(self):
        """Тест: 1/i → 0."""
        indices = list(range(1, 41))
        trace = classify_limit("inv", indices, [1 / i for i in indices])
        assert trace.limit.kind == ExtendedKind.ZERO
        assert trace.converged

    def test_infinite_limit(self):
        """Тест: i² → ∞."""
        indices = list(range(1, 41))
        trace = classify_limit("square", indices, [i * i for i in indices])
        assert trace.limit.is_infinite

    def test_constant_limit(self):
        """Тест: постоянная последовательность сходится."""
        trace = classify_limit("const", range(1, 21), [3.0] * 20)
        assert trace.limit.is_finite
        assert trace.limit.value == pytest.approx(3.0)
        assert trace.converged

    def test_richardson_extrapolation(self):
        """Тест: 2 + 1/i сходится к 2 через экстраполяцию."""
        indices = list(range(1, 41))
        trace = classify_limit("slow", indices, [2 + 1 / i for i in indices], consecutive=True)
        assert trace.converged
        assert trace.extrapolated == pytest.approx(2.0, abs=1e-6)
        assert trace.limit.value == pytest.approx(2.0, abs=1e-6)

    def test_slow_without_extrapolation_not_converged(self):
        """Тест: без подряд идущих индексов медленный след не сходится."""
        indices = list(range(1, 41))
        trace = classify_limit("slow", indices, [2 + 1 / i for i in indices])
        assert trace.limit.is_finite
        assert not trace.converged

    @pytest.mark.parametrize("mode,sign,expected", [("liminf", 1, 1.0), ("limsup", -1, 3.0)])
    def test_oscillating_envelopes(self, mode, sign, expected):
        """Тест: для 2 ± (-1)^i нижний предел равен 1, верхний 3."""
        indices = list(range(1, 41))
        values = [2 + sign * (-1) ** i for i in indices]
        trace = classify_limit("osc", indices, values, mode)
        assert trace.limit.value == pytest.approx(expected)
        assert trace.converged

    def test_oscillating_lim_not_converged(self):
        """Тест: обычный предел колеблющейся последовательности не подтверждается."""
        indices = list(range(1, 41))
        trace = classify_limit("osc", indices, [2 + (-1) ** i for i in indices])
        assert not trace.converged

    def test_short_trace_unknown(self):
        """Тест: след короче четырёх точек не классифицируется."""
        trace = classify_limit("short", [1, 2, 3], [1.0, 1.0, 1.0])
        assert trace.limit.kind == ExtendedKind.UNKNOWN

    def test_richardson_needs_data(self):
        """Тест: при малом числе значений экстраполяция не выполняется."""
        assert richardson_limit([1.0, 1.0, 1.0]) is None

    def test_to_float_overflow(self):
        """Тест: огромное mpf переходит в inf."""
        assert to_float(mpmath.mpf(10) ** 400) == math.inf
