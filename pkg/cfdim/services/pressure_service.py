"""
Сервис вычисления диофантовой функции давления.

Зона ответственности:
- Суммы S_n = Σ q_n^{-2θ} перебором слов и итерацией оператора переноса
- Сертифицированные скобки для ограниченного давления P_M(θ)
- Оценка хвоста δ_M(θ) и скобки для полного давления P(θ)
- Адаптивное уточнение скобки до заданной ширины
- Быстрые несертифицированные оценки и кривые P(θ) для сканирования и графиков
"""

import itertools
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import CubicSpline
from scipy.special import logsumexp

from cfdim.models.pressure import BracketKind, PressureBracket, PressureMethod
from cfdim.services.transfer_operator import DEFAULT_EXPLICIT_DIGITS, TransferOperator
from cfdim.utils.error_handling import BudgetError, DomainError
from cfdim.utils.logger import log_computation


LOG2 = math.log(2.0)
DEFAULT_ENUMERATION_CAP = 50_000_000
DEFAULT_MARGIN = 0.005
TAIL_CUTOFF_TERMS = 100_000
ENUMERATION_CHUNK = 1 << 18


@dataclass
class RefineBudget:
    """Бюджет адаптивного уточнения скобки."""

    max_steps: int = 24
    max_depth: int = 16384
    max_cap: int = 1024
    start_cap: int = 8
    start_depth: int = 8
    enumeration_words: int = 200_000


def tail_delta(theta: float, digit_cap: int, cutoff_terms: int = TAIL_CUTOFF_TERMS) -> float:
    """
    Верхняя оценка δ_M(θ) = Σ_{j>M} (2/j)^{2θ}.

    Частичная сумма до M + cutoff_terms плюс интегральная оценка остатка.

    Raises:
        DomainError: при θ ≤ 1/2 ряд расходится
    """
    if theta <= 0.5:
        raise DomainError(f"tail_delta: theta={theta} ≤ 1/2, ряд расходится")
    if digit_cap < 1:
        raise DomainError(f"tail_delta: M={digit_cap} должно быть натуральным")
    s = 2.0 * theta
    last = digit_cap + cutoff_terms
    j = np.arange(last, digit_cap, -1, dtype=float)
    partial = float(np.sum(j ** (-s)))
    integral = last ** (1.0 - s) / (s - 1.0)
    return 2.0 ** s * (partial + integral)


def enumerate_log_sum(
    theta: float,
    digit_cap: int,
    depth: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
    threads: int = 1,
) -> float:
    """
    log Σ_{1≤a_i≤M} q_n^{-2θ} полным перебором слов.

    Перебор идёт блоками по префиксам в лексикографическом порядке,
    свёртка log-sum-exp в том же порядке.

    Raises:
        BudgetError: если M^n превышает cap
    """
    words = digit_cap ** depth
    if words > cap:
        raise BudgetError(f"Перебор {digit_cap}^{depth} = {words} слов превышает лимит {cap}")

    suffix_len = depth
    while suffix_len > 0 and digit_cap ** suffix_len > ENUMERATION_CHUNK:
        suffix_len -= 1
    prefix_len = depth - suffix_len
    digits = np.arange(1, digit_cap + 1, dtype=float)
    s = 2.0 * theta

    def block(prefix: Tuple[int, ...]) -> float:
        log_q = 0.0
        ratio = 0.0
        for a in prefix:
            log_q += math.log(a + ratio)
            ratio = 1.0 / (a + ratio)
        log_qs = np.array([log_q])
        ratios = np.array([ratio])
        for _ in range(suffix_len):
            shifted = digits[None, :] + ratios[:, None]
            log_qs = (log_qs[:, None] + np.log(shifted)).ravel()
            ratios = (1.0 / shifted).ravel()
        return float(logsumexp(-s * log_qs))

    prefixes = list(itertools.product(range(1, digit_cap + 1), repeat=prefix_len))
    if threads > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(block, prefixes))
    else:
        parts = [block(prefix) for prefix in prefixes]
    return float(logsumexp(parts))


class PressureService:
    """Сервис сертифицированных скобок давления."""

    def __init__(
        self,
        enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
        grid_size: int = 512,
        interpolation_order: int = 3,
        explicit_digits: int = DEFAULT_EXPLICIT_DIGITS,
        singularity_margin: float = DEFAULT_MARGIN,
        threads: int = 1,
        operator_cache_size: int = 32,
    ):
        self.enumeration_cap = enumeration_cap
        self.grid_size = grid_size
        self.interpolation_order = interpolation_order
        self.explicit_digits = explicit_digits
        self.singularity_margin = singularity_margin
        self.threads = threads
        self.operator_cache_size = operator_cache_size
        self._lock = threading.Lock()
        self._brackets: Dict[tuple, PressureBracket] = {}
        self._operators: Dict[tuple, TransferOperator] = {}

    # Кэши

    def _remember(self, key: tuple, bracket: PressureBracket) -> PressureBracket:
        """Запись в кэш однократна: первое значение по ключу остаётся."""
        with self._lock:
            return self._brackets.setdefault(key, bracket)

    def _recall(self, key: tuple) -> Optional[PressureBracket]:
        with self._lock:
            return self._brackets.get(key)

    def operator(
        self,
        theta: float,
        digit_cap: Optional[int],
        grid_size: Optional[int] = None,
    ) -> TransferOperator:
        """Оператор переноса из кэша или новый."""
        grid_size = grid_size or self.grid_size
        key = (float(theta), digit_cap, grid_size, self.interpolation_order, self.explicit_digits)
        with self._lock:
            cached = self._operators.get(key)
        if cached is not None:
            return cached
        started = time.perf_counter()
        built = TransferOperator(
            theta,
            digit_cap,
            grid_size=grid_size,
            interpolation_order=self.interpolation_order,
            explicit_digits=self.explicit_digits,
        )
        log_computation(
            "transfer_operator",
            int((time.perf_counter() - started) * 1000),
            f"theta={theta} cap={digit_cap} grid={grid_size}",
        )
        with self._lock:
            if len(self._operators) >= self.operator_cache_size:
                self._operators.pop(next(iter(self._operators)))
            return self._operators.setdefault(key, built)

    # Суммы и скобки

    def _check_restricted(self, theta: float, digit_cap: Optional[int], depth: int) -> None:
        if not math.isfinite(theta) or theta <= 0:
            raise DomainError(f"theta={theta} должно быть положительным")
        if digit_cap is not None and digit_cap < 1:
            raise DomainError(f"M={digit_cap} должно быть натуральным")
        if depth < 1:
            raise DomainError(f"Глубина n={depth} должна быть натуральной")

    def _check_full(self, theta: float) -> None:
        if not math.isfinite(theta) or theta <= 0.5 + self.singularity_margin:
            raise DomainError(
                f"theta={theta} слишком близко к особенности 1/2 "
                f"(требуется > {0.5 + self.singularity_margin})"
            )

    def restricted_log_sum(
        self,
        theta: float,
        digit_cap: int,
        depth: int,
        method: PressureMethod = PressureMethod.ENUMERATE,
    ) -> float:
        """
        log S_n для цифр от 1 до M.

        Args:
            theta: θ > 0
            digit_cap: M ≥ 1
            depth: n ≥ 1
            method: перебор или итерация оператора

        Returns:
            log Σ q_n^{-2θ}
        """
        self._check_restricted(theta, digit_cap, depth)
        method = PressureMethod(method)
        if method == PressureMethod.ENUMERATE:
            return enumerate_log_sum(theta, digit_cap, depth, self.enumeration_cap, self.threads)
        return self.operator(theta, digit_cap).log_sum(depth)

    def _bracket_from_log_sum(
        self,
        theta: float,
        log_sum: float,
        depth: int,
        kind: BracketKind,
        digit_cap: Optional[int],
        method: PressureMethod,
        started: float,
        certified: bool = True,
    ) -> PressureBracket:
        upper = log_sum / depth
        lower = upper - 2.0 * theta * LOG2 / depth
        return PressureBracket(
            theta=theta,
            lower=lower,
            upper=upper,
            kind=kind,
            digit_cap=digit_cap,
            depth=depth,
            method=method,
            certified=certified,
            runtime=time.perf_counter() - started,
        )

    def pressure_restricted(
        self,
        theta: float,
        digit_cap: int,
        depth: int,
        method: PressureMethod = PressureMethod.ENUMERATE,
    ) -> PressureBracket:
        """
        Скобка [(1/n)log S_n - 2θ log2/n, (1/n)log S_n] для P_M(θ).

        Верхний конец следует из q_{n+k} ≥ q_n q_k, нижний из q_{n+k} ≤ 2 q_n q_k.
        """
        method = PressureMethod(method)
        key = ("restricted", float(theta), digit_cap, depth, method.value)
        cached = self._recall(key)
        if cached is not None:
            return cached
        started = time.perf_counter()
        log_sum = self.restricted_log_sum(theta, digit_cap, depth, method)
        bracket = self._bracket_from_log_sum(
            theta, log_sum, depth, BracketKind.RESTRICTED, digit_cap, method, started
        )
        return self._remember(key, bracket)

    def tail_delta(self, theta: float, digit_cap: int) -> float:
        """δ_M(θ), см. модульную функцию tail_delta."""
        return tail_delta(theta, digit_cap)

    def pressure_full(
        self,
        theta: float,
        digit_cap: Optional[int],
        depth: int,
        method: PressureMethod = PressureMethod.OPERATOR_ITERATION,
    ) -> PressureBracket:
        """
        Скобка для полного давления P(θ).

        При конечном M: [нижний конец P_M, max(U+δ, log(e^U+δ))], где U верхний
        конец скобки P_M и δ = δ_M(θ); это следует из S_n ≤ 2^{2θ}(e^{P_M}+δ)^n.
        При M=None возвращается несертифицированная оценка pressure_unbounded.
        """
        self._check_full(theta)
        method = PressureMethod(method)
        key = ("full", float(theta), digit_cap, depth, method.value)
        cached = self._recall(key)
        if cached is not None:
            return cached
        started = time.perf_counter()

        if digit_cap is None:
            if method == PressureMethod.ENUMERATE:
                raise DomainError("Перебор невозможен для неограниченного алфавита")
            return self._remember(key, self.pressure_unbounded(theta, depth))

        restricted = self.pressure_restricted(theta, digit_cap, depth, method)
        delta = tail_delta(theta, digit_cap)
        upper_u = restricted.upper
        upper = max(upper_u + delta, upper_u + math.log1p(delta * math.exp(-upper_u)))
        bracket = PressureBracket(
            theta=theta,
            lower=restricted.lower,
            upper=upper,
            kind=BracketKind.FULL,
            digit_cap=digit_cap,
            depth=depth,
            method=method,
            tail=upper - upper_u,
            runtime=time.perf_counter() - started,
        )
        return self._remember(key, bracket)

    def pressure_unbounded(self, theta: float, depth: int) -> PressureBracket:
        """
        Оценка P(θ) по всему алфавиту без отступа от особенности.

        Суммы считаются оператором с дзета-хвостом, поэтому скобка помечается
        certified=False: её ширина 2θ log2/n не покрывает ошибку дискретизации.
        """
        if not math.isfinite(theta) or theta <= 0.5:
            raise DomainError(f"theta={theta} ≤ 1/2: давление бесконечно")
        if depth < 1:
            raise DomainError(f"Глубина n={depth} должна быть натуральной")
        key = ("unbounded", float(theta), depth)
        cached = self._recall(key)
        if cached is not None:
            return cached
        started = time.perf_counter()
        log_sum = self.operator(theta, None).log_sum(depth)
        bracket = self._bracket_from_log_sum(
            theta, log_sum, depth, BracketKind.FULL, None, PressureMethod.OPERATOR_ITERATION, started,
            certified=False,
        )
        return self._remember(key, bracket)

    def pressure_refine(
        self,
        theta: float,
        tol: float,
        budget: Optional[RefineBudget] = None,
    ) -> PressureBracket:
        """
        Уточнять скобку P(θ), пока ширина не станет ≤ tol или не кончится бюджет.

        Увеличивается та часть ширины, которая больше: глубина n (комбинаторная
        часть 2θ log2/n) или M (хвост δ_M) до max_cap. Все скобки строятся при
        конечном M и остаются сертифицированными. При исчерпании бюджета
        возвращается лучшая скобка с converged=False.
        """
        self._check_full(theta)
        if not tol > 0:
            raise DomainError(f"Допуск tol={tol} должен быть положительным")
        budget = budget or RefineBudget()
        cap = budget.start_cap
        depth = budget.start_depth
        best: Optional[PressureBracket] = None

        for step in range(budget.max_steps):
            if cap ** depth <= min(budget.enumeration_words, self.enumeration_cap):
                method = PressureMethod.ENUMERATE
            else:
                method = PressureMethod.OPERATOR_ITERATION
            bracket = self.pressure_full(theta, cap, depth, method)
            if best is None or bracket.width < best.width:
                best = bracket
            logger.debug(
                f"refine theta={theta} step={step} cap={cap} n={depth} width={bracket.width:.3e}"
            )
            if bracket.width <= tol:
                return bracket

            combinatorial = 2.0 * theta * LOG2 / depth
            if bracket.tail > combinatorial and cap * 4 <= budget.max_cap:
                cap *= 4
            elif depth * 2 <= budget.max_depth:
                depth *= 2
            elif cap * 4 <= budget.max_cap:
                cap *= 4
            else:
                break

        logger.warning(f"pressure_refine: budget exhausted at theta={theta}, tol={tol}")
        return best.model_copy(update={"converged": False})

    # Быстрые оценки

    def pressure_estimate(
        self,
        theta: float,
        digit_cap: Optional[int] = None,
        grid_size: Optional[int] = None,
    ) -> float:
        """Несертифицированная оценка P(θ) или P_M(θ) по ведущему собственному числу."""
        if digit_cap is None:
            self._check_full(theta)
        else:
            self._check_restricted(theta, digit_cap, 1)
        return self.operator(theta, digit_cap, grid_size).leading_log_eigenvalue()

    def pressure_curve(
        self,
        thetas: Sequence[float],
        digit_cap: Optional[int] = None,
        grid_size: Optional[int] = None,
    ) -> List[Tuple[float, float]]:
        """Точки (θ, P(θ)) для графика."""
        return [(float(t), self.pressure_estimate(t, digit_cap, grid_size)) for t in thetas]


class PressureCurve:
    """
    Сплайн оценки P(θ) по сетке θ для быстрых несертифицированных корней.

    Для неограниченного алфавита сетка равномерна по log(θ - 1/2).
    """

    def __init__(
        self,
        service: PressureService,
        digit_cap: Optional[int] = None,
        theta_max: float = 1.2,
        points: int = 160,
        grid_size: int = 128,
    ):
        self.digit_cap = digit_cap
        if digit_cap is None:
            self.theta_min = 0.5 + service.singularity_margin / 2
            u = np.linspace(math.log(self.theta_min - 0.5), math.log(theta_max - 0.5), points)
            thetas = 0.5 + np.exp(u)
            values = [
                service.operator(float(t), None, grid_size).leading_log_eigenvalue() for t in thetas
            ]
            self._spline = CubicSpline(u, values)
        else:
            self.theta_min = 1e-3
            thetas = np.linspace(self.theta_min, theta_max, points)
            values = [service.pressure_estimate(float(t), digit_cap, grid_size) for t in thetas]
            self._spline = CubicSpline(thetas, values)
        self.theta_max = theta_max

    def __call__(self, theta: float) -> float:
        if not self.theta_min <= theta <= self.theta_max:
            raise DomainError(f"theta={theta} вне диапазона кривой [{self.theta_min}, {self.theta_max}]")
        if self.digit_cap is None:
            return float(self._spline(math.log(theta - 0.5)))
        return float(self._spline(theta))
