"""
Сервис вычисления размерности.

Зона ответственности:
- Сертифицированная бисекция уравнений давления P(θ) = rhs(θ) и P_N(θ) = 0
- Именованные решения θ(α,β), Θ(b,c), θ(log B), θ̂(log C), η_d(c), ξ_γ(c)
- Выбор ветки формулы по профилю роста или функции
- Оценки Лиао-Рамса, Ярника и Гуда, спектр максимальной цифры
"""

import math
import time
from typing import Callable, Dict, List, Optional, Sequence, Union

import mpmath
import numpy as np
from loguru import logger
from scipy.optimize import brentq
from scipy.special import zeta

from cfdim.models.dimension import (
    DimensionBranch,
    DimensionResult,
    GammaScan,
    GoodBoundsReport,
    PressureEquation,
    ResultKind,
)
from cfdim.models.pressure import PressureBracket, PressureMethod
from cfdim.models.profile import (
    ExtendedReal,
    FunctionProfile,
    GrowthProfile,
    SumClassification,
    SumDescriptor,
    Verdict,
)
from cfdim.services.expression import WORKING_DPS, as_generator, log_positive
from cfdim.services.limits import classify_limit, to_float
from cfdim.services.pressure_service import DEFAULT_MARGIN, PressureCurve, PressureService
from cfdim.services.profile_service import ProfileService
from cfdim.utils.error_handling import (
    BudgetError,
    DomainError,
    HypothesisError,
    IndeterminateProfileError,
    LimitFlagError,
)
from cfdim.utils.logger import log_computation


DEFAULT_TOLERANCE = 1e-3
DEFAULT_MAX_DEPTH = 16384
START_DEPTH = 8
# перебор для P_N выгоднее оператора, пока N^n не больше этого числа
RESTRICTED_ENUMERATION_WORDS = 4096
GAMMA_SCAN = (0.05, 2.0, 200)
# (M, n) скобок с хвостом δ_M, подтверждающих корень уравнения давления
CERTIFY_LEVELS = ((64, 32), (512, 64))

BracketFunction = Callable[[float, int], PressureBracket]


def _inverse_plus(value: ExtendedReal, shift: float) -> float:
    """1/(x + shift) с соглашением 1/∞ = 0."""
    if value.is_infinite:
        return 0.0
    return 1.0 / (value.as_float() + shift)


def _describe_profile(profile: GrowthProfile) -> Dict[str, str]:
    return {name: str(getattr(profile, name)) for name in ("alpha", "beta", "xi", "gamma")}


class DimensionService:
    """Сервис решений уравнений давления и выбора ветки формулы размерности."""

    def __init__(
        self,
        pressure: Optional[PressureService] = None,
        profiles: Optional[ProfileService] = None,
        tolerance: float = DEFAULT_TOLERANCE,
        max_depth: int = DEFAULT_MAX_DEPTH,
        margin: float = DEFAULT_MARGIN,
    ):
        self.pressure = pressure or PressureService()
        self.profiles = profiles or ProfileService()
        self.tolerance = tolerance
        self.max_depth = max_depth
        self.margin = margin
        self._curves: Dict[Optional[int], PressureCurve] = {}

    # Бисекция

    def _side(self, bracket_at: BracketFunction, rhs: Callable[[float], float], theta: float) -> tuple:
        """
        Сравнить скобку давления с правой частью в точке θ.

        Returns:
            (знак, глубина): +1 скобка строго выше rhs, -1 строго ниже,
            0 не разделились до max_depth
        """
        depth = START_DEPTH
        target = rhs(theta)
        while depth <= self.max_depth:
            bracket = bracket_at(theta, depth)
            if bracket.strictly_above(target):
                return 1, depth
            if bracket.strictly_below(target):
                return -1, depth
            depth *= 2
        return 0, depth // 2

    def _bisect(
        self,
        bracket_at: BracketFunction,
        rhs: Callable[[float], float],
        lo: float,
        hi: float,
        tol: float,
    ) -> tuple:
        """Бисекция на [lo, hi], где давление выше rhs в lo и ниже в hi."""
        evaluations, deepest = 0, START_DEPTH
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            side, depth = self._side(bracket_at, rhs, mid)
            evaluations += 1
            if side == 0:
                for probe in (mid - tol / 4, mid + tol / 4):
                    if lo < probe < hi:
                        side, depth = self._side(bracket_at, rhs, probe)
                        evaluations += 1
                        if side:
                            mid = probe
                            break
            if side == 0:
                raise BudgetError(
                    f"Скобка давления не отделилась от правой части около θ={mid:.6f} "
                    f"на глубине {self.max_depth}",
                    {"theta": mid, "lo": lo, "hi": hi},
                )
            deepest = max(deepest, depth)
            if side > 0:
                lo = mid
            else:
                hi = mid
        return lo, hi, evaluations, deepest

    def solve_pressure_equation(self, eq: PressureEquation, tol: Optional[float] = None) -> DimensionResult:
        """
        Единственное решение P(θ) = rhs(θ) на (1/2, 1].

        Сначала корень локализуется бисекцией по оценкам оператора с дзета-хвостом:
        точка θ классифицируется, только если скобка строго выше или строго ниже
        rhs(θ); иначе удваивается глубина. Затем отрезок расширяется, пока скобки
        P(θ) при конечном M с хвостом δ_M не подтвердят знак на концах.
        Если подтверждённый отрезок не шире tol, результат имеет вид enclosure,
        иначе estimate с подтверждённым отрезком в diagnostics.
        Если rhs(1) ≤ 0, пересечения внутри нет и возвращается ровно 1.

        Raises:
            DomainError: tol ≤ 0
            BudgetError: скобки не разделились до max_depth
        """
        tol = self.tolerance if tol is None else tol
        if not tol > 0:
            raise DomainError(f"Допуск tol={tol} должен быть положительным")
        started = time.perf_counter()
        diagnostics = {"equation": eq.describe(), "label": eq.label, **eq.parameters}

        rhs_at_one = eq.rhs(1.0)
        if rhs_at_one <= 0.0:
            branch = DimensionBranch.PRESSURE_ROOT if rhs_at_one == 0.0 else DimensionBranch.NO_CROSSING
            return DimensionResult.exact(1.0, branch, diagnostics).model_copy(
                update={"tolerance": tol, "runtime": time.perf_counter() - started}
            )

        bracket_at = self.pressure.pressure_unbounded
        lo, hi, margin = None, 1.0, self.margin
        evaluations, deepest = 0, START_DEPTH
        while lo is None:
            theta = 0.5 + margin
            side, depth = self._side(bracket_at, eq.rhs, theta)
            evaluations += 1
            deepest = max(deepest, depth)
            if side > 0:
                lo = theta
            elif side < 0:
                hi = theta
            if lo is None and margin <= tol / 2:
                if hi - 0.5 > tol:
                    raise BudgetError(f"Не удалось отделить корень от особенности 1/2 для {eq.describe()}")
                lo = 0.5
            margin /= 2

        if hi - lo > tol:
            lo, hi, steps, depth = self._bisect(bracket_at, eq.rhs, lo, hi, tol)
            evaluations += steps
            deepest = max(deepest, depth)
        diagnostics["evaluations"] = evaluations

        lower, upper = self._certified_enclosure(eq.rhs, lo, hi, tol)
        diagnostics["certified_enclosure"] = [lower, upper]
        if upper - lower <= tol:
            return self._result(lower, upper, DimensionBranch.PRESSURE_ROOT, diagnostics, tol, deepest, started)
        if not lower <= lo <= hi <= upper:
            logger.warning(f"solve: operator estimate [{lo:.6f}, {hi:.6f}] outside [{lower:.6f}, {upper:.6f}]")
            notes = ["оценка оператора вне подтверждённого отрезка, возвращается подтверждённый отрезок"]
            return self._result(lower, upper, DimensionBranch.PRESSURE_ROOT, diagnostics, tol, deepest, started, notes)
        notes = [f"оценка оператора; подтверждённый отрезок [{lower:.4f}, {upper:.4f}] шире tol"]
        if lo == 0.5:
            notes.append(f"корень ближе {hi - 0.5:.3g} к особенности 1/2")
        return self._result(
            lo, hi, DimensionBranch.PRESSURE_ROOT, diagnostics, tol, deepest, started, notes,
            kind=ResultKind.ESTIMATE,
        )

    def _certified_side(self, rhs: Callable[[float], float], theta: float) -> int:
        """
        Знак P(θ) - rhs(θ) по скобкам с конечным M и хвостом δ_M.

        Returns:
            +1 или -1, если какая-то скобка из CERTIFY_LEVELS отделилась от rhs, иначе 0
        """
        target = rhs(theta)
        for digit_cap, depth in CERTIFY_LEVELS:
            bracket = self.pressure.pressure_full(theta, digit_cap, depth, PressureMethod.OPERATOR_ITERATION)
            if bracket.strictly_above(target):
                return 1
            if bracket.strictly_below(target):
                return -1
        return 0

    def _certified_enclosure(self, rhs: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple:
        """
        Отрезок [L, H] ⊇ корня, подтверждённый сертифицированными скобками.

        От lo влево и от hi вправо шаг удваивается, начиная с tol/2. Без
        подтверждения концами служат 1/2 (там P = +∞) и 1 (P(1) = 0 < rhs(1)).
        """
        floor = 0.5 + self.pressure.singularity_margin
        lower, step = 0.5, tol / 2
        while lo - step > floor:
            if self._certified_side(rhs, lo - step) > 0:
                lower = lo - step
                break
            step *= 2
        upper, step = 1.0, tol / 2
        while hi + step < 1.0:
            if self._certified_side(rhs, hi + step) < 0:
                upper = hi + step
                break
            step *= 2
        return lower, upper

    def _result(
        self, lo, hi, branch, diagnostics, tol, depth, started, notes=None, digit_cap=None, kind=ResultKind.ENCLOSURE
    ) -> DimensionResult:
        runtime = time.perf_counter() - started
        log_computation("solve", int(runtime * 1000), f"{branch.value} [{lo:.6f}, {hi:.6f}]")
        return DimensionResult(
            value_lo=lo,
            value_hi=hi,
            branch=branch,
            kind=kind,
            diagnostics=diagnostics,
            notes=notes or [],
            tolerance=tol,
            digit_cap=digit_cap,
            depth=depth,
            runtime=runtime,
        )

    # Именованные решения

    def theta_alpha_beta(self, alpha: float, beta: float, tol: Optional[float] = None) -> DimensionResult:
        """θ(α,β): решение P(θ) = (2α-β)θ - (α-β) при α ≥ β ≥ 0, α > 0."""
        if not (math.isfinite(alpha) and math.isfinite(beta)) or not alpha >= beta >= 0 or alpha <= 0:
            raise DomainError(f"Требуется α ≥ β ≥ 0 и α > 0, получено α={alpha}, β={beta}")
        return self.solve_pressure_equation(PressureEquation.alpha_beta(alpha, beta), tol)

    def theta_big(self, b: float, c: float, tol: Optional[float] = None) -> DimensionResult:
        """Θ(b,c): решение P(θ) = b(2θ-1) + cθ; Θ(0,0) = 1."""
        if not (math.isfinite(b) and math.isfinite(c)) or b < 0 or c < 0:
            raise DomainError(f"Требуются конечные b, c ≥ 0, получено b={b}, c={c}")
        if b == 0 and c == 0:
            return DimensionResult.exact(1.0, DimensionBranch.PRESSURE_ROOT, {"b": 0.0, "c": 0.0})
        return self.solve_pressure_equation(PressureEquation.big(b, c), tol)

    def theta_type_one(self, log_b: float, tol: Optional[float] = None) -> DimensionResult:
        """θ(log B): решение P(θ) = θ log B."""
        if not math.isfinite(log_b) or log_b < 0:
            raise DomainError(f"log B = {log_b} должно быть конечным и неотрицательным")
        return self.solve_pressure_equation(PressureEquation.type_one(log_b), tol)

    def theta_hat(self, log_c: float, tol: Optional[float] = None) -> DimensionResult:
        """θ̂(log C): решение P(θ) = (√θ+√(2θ-1))² log C."""
        if not math.isfinite(log_c) or log_c <= 0:
            raise DomainError(f"log C = {log_c} должно быть положительным и конечным")
        return self.solve_pressure_equation(PressureEquation.hat(log_c), tol)

    def dim_F_N(self, N: int, tol: Optional[float] = None) -> DimensionResult:
        """
        θ_N: нуль ограниченного давления P_N на [0, 1].

        P_N(0) = log N > 0 и P_N(1) < 0 при N ≥ 2; F_1 состоит из одной точки.
        """
        tol = self.tolerance if tol is None else tol
        if not isinstance(N, int) or N < 1:
            raise DomainError(f"N={N} должно быть натуральным")
        if N == 1:
            return DimensionResult.exact(0.0, DimensionBranch.SINGLE_POINT, {"N": 1})
        started = time.perf_counter()

        def bracket_at(theta: float, depth: int) -> PressureBracket:
            method = PressureMethod.ENUMERATE
            if N**depth > RESTRICTED_ENUMERATION_WORDS:
                method = PressureMethod.OPERATOR_ITERATION
            return self.pressure.pressure_restricted(theta, N, depth, method)

        lo, hi, steps, depth = self._bisect(bracket_at, lambda theta: 0.0, 0.0, 1.0, tol)
        diagnostics = {"N": N, "evaluations": steps}
        if N > 8:
            bounds = self.jarnik_bounds(N)
            diagnostics["jarnik"] = [bounds.value_lo, bounds.value_hi]
        return self._result(lo, hi, DimensionBranch.BOUNDED_DIGITS, diagnostics, tol, depth, started, digit_cap=N)

    def fast_root(self, eq: PressureEquation, digit_cap: Optional[int] = None) -> float:
        """
        Несертифицированный корень P(θ) = rhs(θ) по сплайну оценок давления.

        Используется для сканов по параметрам и графиков.
        """
        curve = self._curves.get(digit_cap)
        if curve is None:
            curve = self._curves.setdefault(digit_cap, PressureCurve(self.pressure, digit_cap))
        if eq.rhs(1.0) <= 0.0:
            return 1.0

        def gap(theta: float) -> float:
            return curve(theta) - eq.rhs(theta)

        lo = curve.theta_min
        if gap(lo) <= 0.0:
            return lo
        return float(brentq(gap, lo, 1.0, xtol=1e-10))

    def type_three_scan(
        self,
        log_c: float,
        gammas: Optional[Sequence[float]] = None,
        certify_hat: bool = True,
        tol: Optional[float] = None,
    ) -> GammaScan:
        """
        Корни уравнений типа III по сетке γ; их максимум равен θ̂(log C).

        Минимум по x = e^γ правой части x((x+1)θ-1)/(x-1) равен (√θ+√(2θ-1))²
        и достигается при x = 1+√((2θ-1)/θ).
        """
        if not math.isfinite(log_c) or log_c <= 0:
            raise DomainError(f"log C = {log_c} должно быть положительным и конечным")
        grid = list(gammas) if gammas is not None else list(np.linspace(*GAMMA_SCAN))
        roots = [self.fast_root(PressureEquation.type_three(log_c, gamma)) for gamma in grid]
        best = int(np.argmax(roots))

        theta_hat = predicted = None
        if certify_hat:
            theta_hat = self.theta_hat(log_c, tol).midpoint
            predicted = math.log(1.0 + math.sqrt((2.0 * theta_hat - 1.0) / theta_hat))
        return GammaScan(
            log_c=log_c,
            gammas=[float(g) for g in grid],
            roots=roots,
            best_gamma=float(grid[best]),
            best_root=roots[best],
            predicted_gamma=predicted,
            theta_hat=theta_hat,
        )

    # Ветки по профилям

    @staticmethod
    def _require(value: ExtendedReal, converged: bool, name: str) -> ExtendedReal:
        if not value.is_known or not converged:
            raise IndeterminateProfileError(
                f"Величина {name} не определена на горизонте; задайте аналитическое значение",
                {"name": name, "value": str(value)},
            )
        return value

    def _check_hypotheses(self, profile: GrowthProfile) -> List[str]:
        report = profile.hypotheses
        if report is None:
            return []
        if report.failed:
            raise HypothesisError(
                f"Нарушены условия {', '.join(report.failed)} для тройки последовательностей",
                report.failed,
            )
        undecided = [name.upper() for name in ("h1", "h2", "h3") if getattr(report, name) == Verdict.INCONCLUSIVE]
        if undecided:
            return [f"условия {', '.join(undecided)} не подтверждены на горизонте"]
        return []

    def _from_growth(self, profile: GrowthProfile, tol, tail_name: str) -> DimensionResult:
        notes = self._check_hypotheses(profile)
        diagnostics = _describe_profile(profile)
        alpha = self._require(profile.alpha, profile.is_converged("alpha"), "alpha")

        if alpha.is_zero:
            return DimensionResult.exact(1.0, DimensionBranch.ALPHA_ZERO, diagnostics, notes)
        if alpha.is_finite:
            beta = self._require(profile.beta, profile.is_converged("beta"), "beta")
            # оценки пределов на горизонте могут дать β чуть больше α
            result = self.theta_alpha_beta(alpha.value, min(beta.as_float(), alpha.value), tol)
            return result.model_copy(
                update={
                    "branch": DimensionBranch.ALPHA_FINITE,
                    "diagnostics": {**result.diagnostics, **diagnostics},
                    "notes": result.notes + notes,
                }
            )

        tail = self._require(getattr(profile, tail_name), profile.is_converged(tail_name), tail_name)
        if tail_name == "xi":
            return DimensionResult.exact(_inverse_plus(tail, 2.0), DimensionBranch.ALPHA_INFINITE_XI, diagnostics, notes)

        if profile.xi.is_infinite and tail.is_finite and tail.value > 1.0:
            notes.append(
                f"ξ = ∞ даёт dim E = 0, а для E_L формула даёт 1/(γ+1) при γ = {tail}; "
                "возвращается значение по формуле для E_L"
            )
            logger.warning(f"dim_EL: ξ = ∞ and γ = {tail} disagree with dim E = 0")
        return DimensionResult.exact(_inverse_plus(tail, 1.0), DimensionBranch.ALPHA_INFINITE_GAMMA, diagnostics, notes)

    def dim_E(self, profile: GrowthProfile, tol: Optional[float] = None) -> DimensionResult:
        """
        Размерность E по профилю (α, β, ξ).

        α = 0 → 1; 0 < α < ∞ → θ(α,β); α = ∞ → 1/(2+ξ).
        """
        return self._from_growth(profile, tol, "xi")

    def dim_EL(self, profile: GrowthProfile, tol: Optional[float] = None) -> DimensionResult:
        """Размерность E_L: как dim_E, но при α = ∞ ответ 1/(γ+1)."""
        return self._from_growth(profile, tol, "gamma")

    def dim_limsup_family(self, fp: FunctionProfile, family: str = "A", tol: Optional[float] = None) -> DimensionResult:
        """
        Размерность A(ψ) или M(ψ) по liminf-инвариантам B_ψ, b_ψ.

        B_ψ = 1 → 1; 1 < B_ψ < ∞ → θ(log B_ψ); B_ψ = ∞ → 1/(b_ψ+1).
        """
        if family not in ("A", "M"):
            raise DomainError(f"Неизвестное семейство {family}: допустимо A или M")
        diagnostics = {"family": family, "log_B": str(fp.log_B_psi), "log_b": str(fp.log_b_psi)}
        log_b_big = self._require(fp.log_B_psi, fp.is_converged("log_B"), "log B_ψ")
        if log_b_big.is_zero:
            return DimensionResult.exact(1.0, DimensionBranch.LIMSUP_SUBEXPONENTIAL, diagnostics)
        if log_b_big.is_finite:
            result = self.theta_type_one(log_b_big.value, tol)
            return result.model_copy(
                update={
                    "branch": DimensionBranch.LIMSUP_EXPONENTIAL,
                    "diagnostics": {**result.diagnostics, **diagnostics},
                }
            )
        log_b_small = self._require(fp.log_b_psi, fp.is_converged("log_b"), "log b_ψ")
        value = _inverse_plus(log_b_small.exp(), 1.0)
        return DimensionResult.exact(value, DimensionBranch.LIMSUP_SUPEREXPONENTIAL, diagnostics)

    def dim_liminf_max(self, fp: FunctionProfile, tol: Optional[float] = None) -> DimensionResult:
        """
        Размерность множества с liminf-условием на максимум цифр по C_ψ, c_ψ.

        C_ψ = 1 → 1; 1 < C_ψ < ∞ и верхний предел является пределом → θ̂(log C_ψ);
        C_ψ = ∞ → 1/(c_ψ+1).

        Raises:
            LimitFlagError: 1 < C_ψ < ∞, но верхний предел не является пределом
        """
        diagnostics = {"log_C": str(fp.log_C_psi), "log_c": str(fp.log_c_psi), "limit_flag": fp.limit_flag}
        log_c_big = self._require(fp.log_C_psi, fp.is_converged("log_C"), "log C_ψ")
        if log_c_big.is_zero:
            return DimensionResult.exact(1.0, DimensionBranch.LIMINF_SUBEXPONENTIAL, diagnostics)
        if log_c_big.is_finite:
            if not fp.limit_flag:
                raise LimitFlagError(
                    "Верхний предел log ψ(n)/n не является пределом: без этого условия формула θ̂(log C) "
                    "неверна (для φ(n) = C^(2^(k²)) на [2^(k²), 2^((k+1)²)) размерность равна θ(log C))",
                    diagnostics,
                )
            result = self.theta_hat(log_c_big.value, tol)
            return result.model_copy(
                update={
                    "branch": DimensionBranch.LIMINF_EXPONENTIAL,
                    "diagnostics": {**result.diagnostics, **diagnostics},
                }
            )
        log_c_small = self._require(fp.log_c_psi, fp.is_converged("log_c"), "log c_ψ")
        value = _inverse_plus(log_c_small.exp(), 1.0)
        return DimensionResult.exact(value, DimensionBranch.LIMINF_SUPEREXPONENTIAL, diagnostics)

    def dim_sum_family(
        self,
        phi: Union[SumDescriptor, str, Callable],
        tol: Optional[float] = None,
        n_max: Optional[int] = None,
    ) -> DimensionResult:
        """
        Размерность S(φ) по дескриптору семейства или сырой функции.

        Ветки с доказанной только верхней оценкой возвращают [0, 1/2]
        с видом upper_bound; неклассифицируемая функция даёт [0, 1]
        с видом indeterminate.
        """
        classification = self.profiles.classify_sum_function(phi, n_max)
        return self._from_classification(classification, tol)

    def _from_classification(self, classification: SumClassification, tol) -> DimensionResult:
        branch = classification.branch
        params = classification.parameters
        diagnostics = {**classification.diagnostics, **params}
        notes = list(classification.notes)

        if branch == DimensionBranch.FULL_DIMENSION:
            return DimensionResult.exact(1.0, branch, diagnostics, notes)
        if branch in (
            DimensionBranch.EXACT_HALF_COR1,
            DimensionBranch.EXACT_HALF_COR2,
            DimensionBranch.EXACT_HALF_POWER,
        ):
            return DimensionResult.exact(0.5, branch, diagnostics, notes)
        if branch in (DimensionBranch.FAMILY_F_I, DimensionBranch.FAMILY_F_II):
            if branch == DimensionBranch.FAMILY_F_I:
                eq = PressureEquation.eta(params["c"], params["d"], params["r"])
            else:
                eq = PressureEquation.xi(params["c"], params["gamma"])
            result = self.solve_pressure_equation(eq, tol)
            return result.model_copy(
                update={"branch": branch, "diagnostics": {**result.diagnostics, **diagnostics}}
            )
        if branch in (DimensionBranch.UPPER_HALF_ED, DimensionBranch.UPPER_HALF_LIMSUP):
            notes.append("доказана только оценка сверху 1/2")
            return DimensionResult(
                value_lo=0.0, value_hi=0.5, branch=branch, kind=ResultKind.UPPER_BOUND,
                diagnostics=diagnostics, notes=notes,
            )
        return DimensionResult(
            value_lo=0.0, value_hi=1.0, branch=DimensionBranch.INDETERMINATE,
            kind=ResultKind.INDETERMINATE, diagnostics=diagnostics, notes=notes,
        )

    # Прочие оценки

    def dim_liao_rams(self, u_gen, v_gen, depth: int = 64) -> DimensionResult:
        """
        Нижняя оценка liminf Σ_{k≤n} log v_k / (2Σ_{k≤n+1} log u_k - log v_{n+1}).

        Отношение вычисляется в лог-шкале на горизонте depth; предел
        оценивается экстраполяцией Ричардсона, иначе берётся минимум хвоста.
        """
        if depth < 8:
            raise DomainError(f"Горизонт depth={depth} < 8 слишком мал")
        started = time.perf_counter()
        u = as_generator(u_gen, "n")
        v = as_generator(v_gen, "n")
        ns = list(range(1, depth + 1))
        notes: List[str] = []
        with mpmath.workdps(WORKING_DPS):
            log_u = [log_positive(u, n=n) for n in range(1, depth + 2)]
            log_v = [log_positive(v, n=n) for n in range(1, depth + 2)]
            if any(value < 0 for value in log_v):
                raise DomainError("Требуется v_n ≥ 1 на всём горизонте")
            ratios = []
            numerator, denominator = mpmath.mpf(0), 2 * log_u[0]
            for n in ns:
                numerator += log_v[n - 1]
                denominator += 2 * log_u[n]
                gap = denominator - log_v[n]
                if gap <= 0:
                    raise DomainError(f"Знаменатель неположителен при n={n}")
                ratios.append(numerator / gap)
            log_ratio = [log_v[n - 1] - log_u[n - 1] for n in ns]

        growth = classify_limit("log(v_n/u_n)", ns, log_ratio, "limsup")
        if growth.limit.is_infinite:
            notes.append("v_n/u_n растёт на горизонте: условие limsup v_n/u_n < ∞ под сомнением")
            logger.warning("dim_liao_rams: ratio v_n/u_n appears unbounded")

        trace = classify_limit("liao_rams", ns, ratios, "lim", consecutive=True)
        # liminf оценивается минимумом по последней четверти горизонта
        window = max(3, depth // 4)
        tail_min = min(to_float(value) for value in ratios[-window:])
        if trace.limit.is_known and trace.converged:
            estimate = trace.limit.as_float()
        else:
            estimate = tail_min
            notes.append("отношение не сошлось, взят минимум хвоста")
        estimate = min(max(estimate, 0.0), 1.0)

        runtime = time.perf_counter() - started
        log_computation("liao_rams", int(runtime * 1000), f"estimate={estimate:.6f} depth={depth}")
        return DimensionResult(
            value_lo=estimate,
            value_hi=estimate,
            branch=DimensionBranch.LIAO_RAMS,
            kind=ResultKind.ESTIMATE,
            diagnostics={
                "ratios_tail": trace.values[-8:],
                "tail_min": tail_min,
                "tail_window": window,
                "extrapolated": trace.extrapolated,
                "converged": trace.converged,
            },
            notes=notes,
            depth=depth,
            runtime=runtime,
        )

    def dim_max_spectrum(self, tau: float, kind: str = "limsup", tol: Optional[float] = None) -> DimensionResult:
        """
        Размерность уровня τ спектра log M_n(x)/n, M_n максимум первых n цифр.

        limsup → θ(τ), liminf → θ̂(τ); τ = 0 даёт 1.
        """
        if not math.isfinite(tau) or tau < 0:
            raise DomainError(f"τ = {tau} должно быть конечным и неотрицательным")
        branches = {"limsup": DimensionBranch.MAX_SPECTRUM_LIMSUP, "liminf": DimensionBranch.MAX_SPECTRUM_LIMINF}
        if kind not in branches:
            raise DomainError(f"Неизвестный вид спектра {kind}: допустимо limsup или liminf")
        if tau == 0:
            return DimensionResult.exact(1.0, branches[kind], {"tau": 0.0})
        result = self.theta_type_one(tau, tol) if kind == "limsup" else self.theta_hat(tau, tol)
        return result.model_copy(update={"branch": branches[kind], "diagnostics": {**result.diagnostics, "tau": tau}})

    @staticmethod
    def dim_digits_to_infinity() -> DimensionResult:
        """Множество {a_n → ∞} имеет размерность 1/2."""
        return DimensionResult.exact(0.5, DimensionBranch.DIGITS_TO_INFINITY)

    @staticmethod
    def jarnik_bounds(N: int) -> DimensionResult:
        """1 - 4/(N log 2) ≤ θ_N ≤ 1 - 1/(8N log N) при N > 8."""
        if N <= 8:
            raise DomainError(f"Оценки Ярника доказаны при N > 8, получено N={N}")
        lower = 1.0 - 4.0 / (N * math.log(2.0))
        upper = 1.0 - 1.0 / (8.0 * N * math.log(N))
        return DimensionResult(
            value_lo=max(lower, 0.0),
            value_hi=upper,
            branch=DimensionBranch.BOUNDED_DIGITS,
            kind=ResultKind.ENCLOSURE,
            diagnostics={"N": N, "source": "jarnik"},
        )

    @staticmethod
    def good_bounds_check(B: float, s: float) -> GoodBoundsReport:
        """
        Элементарные оценки dim A(B).

        B^{4s} < ζ(2s) - 1 - 4^s даёт dim A(B) ≥ s; B^s > ζ(2s) даёт dim A(B) ≤ s.
        """
        if not B > 1 or not 0.5 < s <= 1.0:
            raise DomainError(f"Требуется B > 1 и s ∈ (1/2, 1], получено B={B}, s={s}")
        zeta_2s = float(zeta(2.0 * s))
        log_b = math.log(B)
        lower = 4.0 * s * log_b < math.log(max(zeta_2s - 1.0 - 4.0**s, 1e-300))
        upper = s * log_b > math.log(zeta_2s)
        return GoodBoundsReport(B=B, s=s, zeta_2s=zeta_2s, lower_certified=lower, upper_certified=upper)
