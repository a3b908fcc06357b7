"""
Сервис профилей роста.

Зона ответственности:
- Инварианты α, β, ξ, γ тройки последовательностей ({n_k}, {s_k}, {t_k})
- Проверка условий (H1)-(H3)
- Инварианты функции ψ: B_ψ, b_ψ, C_ψ, c_ψ, масштабы √n и n, условия (ed) и (maxine)
- Классификация функций φ для множеств S(φ)
"""

import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
from loguru import logger

from cfdim.models.dimension import DimensionBranch
from cfdim.models.profile import (
    ExtendedReal,
    FunctionProfile,
    GrowthProfile,
    HypothesisReport,
    LimitTrace,
    SequenceTriple,
    SumClassification,
    SumDescriptor,
    SumFamily,
    Verdict,
)
from cfdim.services.expression import WORKING_DPS, as_generator, log_positive
from cfdim.services.limits import (
    RELATIVE_TOL,
    SLOPE_FLOOR,
    ZERO_FLOOR,
    classify_limit,
    to_float,
)
from cfdim.utils.error_handling import DomainError


DEFAULT_K_MAX = 24
DEFAULT_N_MAX = 2**40
DENSE_HORIZON = 128
ED_EPSILONS = (1.0, 0.5, 0.25)
ED_FLOOR = 1e-3
MAXINE_TOL = 1e-2
MAXINE_SAMPLES = 32
# φ(n)/n → ∞ подтверждается, когда log φ(n) - log n превышает log 10^6 и растёт
SUPERLINEAR_LOG = math.log(1e6)


def sample_horizon(n_max: int, dense: int = DENSE_HORIZON) -> List[int]:
    """Плотная сетка 1..dense и далее геометрическая с множителем √2 до n_max."""
    points = list(range(1, min(dense, n_max) + 1))
    step = 1
    while True:
        n = int(dense * math.sqrt(2) ** step)
        if n > n_max:
            break
        if n > points[-1]:
            points.append(n)
        step += 1
    return points


class ProfileService:
    """Сервис инвариантов роста последовательностей и функций."""

    def __init__(
        self,
        k_max: int = DEFAULT_K_MAX,
        n_max: int = DEFAULT_N_MAX,
        zero_floor: float = ZERO_FLOOR,
        slope_floor: float = SLOPE_FLOOR,
        rel_tol: float = RELATIVE_TOL,
    ):
        self.k_max = k_max
        self.n_max = n_max
        self.zero_floor = zero_floor
        self.slope_floor = slope_floor
        self.rel_tol = rel_tol

    def _classify(self, name, indices, values, mode="lim", **kwargs) -> LimitTrace:
        options = dict(zero_floor=self.zero_floor, slope_floor=self.slope_floor, rel_tol=self.rel_tol)
        options.update(kwargs)
        return classify_limit(name, indices, values, mode, **options)

    # Последовательности

    def _sequence_logs(self, triple: SequenceTriple, k_max: int) -> Tuple[list, list, list]:
        """n_k, log s_k, log t_k для k = 1..k_max+1."""
        n_gen = as_generator(triple.n_gen, "k")
        s_gen = as_generator(triple.s_gen, "k")
        t_gen = as_generator(triple.t_gen, "k")
        positions, log_s, log_t = [], [], []
        with mpmath.workdps(WORKING_DPS):
            for k in range(1, k_max + 2):
                n_k = n_gen.value(k=k)
                if n_k < 1:
                    raise DomainError(f"n_{k} = {n_k} должно быть натуральным")
                if positions and n_k <= positions[-1]:
                    raise DomainError(f"Последовательность n_k не возрастает при k={k}")
                positions.append(n_k)
                log_s.append(log_positive(s_gen, k=k, n_k=n_k))
                log_t.append(log_positive(t_gen, k=k, n_k=n_k))
        return positions, log_s, log_t

    def growth_profile(
        self,
        triple: SequenceTriple,
        k_max: Optional[int] = None,
        overrides: Optional[Mapping[str, float]] = None,
    ) -> GrowthProfile:
        """
        Оценить α, β, ξ, γ по следам до k_max.

        α_k = Σ_{j≤k} log s_j / n_k, β_k = log s_k / n_k,
        ξ_k = log s_{k+1} / Σ_{j≤k} log s_j (limsup),
        log γ_k = log log s_k / n_k (limsup).
        Аналитические подстановки имеют приоритет и считаются сошедшимися.
        """
        k_max = k_max or self.k_max
        if k_max < 8:
            raise DomainError(f"k_max={k_max} < 8: горизонт слишком мал")
        positions, log_s, _ = self._sequence_logs(triple, k_max)
        ks = list(range(1, k_max + 1))

        with mpmath.workdps(WORKING_DPS):
            sums = []
            total = mpmath.mpf(0)
            for value in log_s:
                total += value
                sums.append(total)
            alpha_values = [sums[i] / positions[i] for i in range(k_max)]
            beta_values = [log_s[i] / positions[i] for i in range(k_max)]
            xi_pairs = [(k, log_s[k] / sums[k - 1]) for k in ks if sums[k - 1] > 0]
            gamma_pairs = [(k, mpmath.log(log_s[k - 1]) / positions[k - 1]) for k in ks if log_s[k - 1] > 0]

        traces: Dict[str, LimitTrace] = {
            "alpha": self._classify("alpha", ks, alpha_values, "lim", consecutive=True),
            "beta": self._classify("beta", ks, beta_values, "lim", consecutive=True),
        }
        if len(xi_pairs) >= 4:
            traces["xi"] = self._classify("xi", *zip(*xi_pairs), mode="limsup")
        log_gamma = None
        if len(gamma_pairs) >= max(4, k_max // 4):
            log_gamma = self._classify("log_gamma", *zip(*gamma_pairs), mode="limsup")
            traces["log_gamma"] = log_gamma
        else:
            logger.warning(f"growth_profile: s_k ≤ e на большей части горизонта, γ неизвестна ({triple.name})")

        values = {
            "alpha": traces["alpha"].limit,
            "beta": traces["beta"].limit,
            "xi": traces["xi"].limit if "xi" in traces else ExtendedReal.unknown(),
            "gamma": log_gamma.limit.exp() if log_gamma else ExtendedReal.unknown(),
        }
        converged = {
            "alpha": traces["alpha"].converged,
            "beta": traces["beta"].converged,
            "xi": "xi" in traces and traces["xi"].converged,
            "gamma": log_gamma is not None and log_gamma.converged,
        }

        forced = dict(triple.overrides)
        forced.update(overrides or {})
        for name, value in forced.items():
            values[name] = ExtendedReal.from_float(value)
            converged[name] = True

        logger.debug(
            f"growth_profile {triple.name}: α={values['alpha']} β={values['beta']} "
            f"ξ={values['xi']} γ={values['gamma']}"
        )
        return GrowthProfile(
            **values,
            converged=converged,
            overridden=sorted(forced),
            k_max=k_max,
            traces=traces,
        )

    def check_hypotheses(self, triple: SequenceTriple, k_max: Optional[int] = None) -> HypothesisReport:
        """
        Проверить (H1) n_k/k → ∞, (H2) log s_k / log t_k → 1, (H3) существование пределов α и β.
        """
        k_max = k_max or self.k_max
        positions, log_s, log_t = self._sequence_logs(triple, k_max)
        ks = list(range(1, k_max + 1))

        with mpmath.workdps(WORKING_DPS):
            density = [positions[k - 1] / k for k in ks]
            ratio_pairs = [(k, log_s[k - 1] / log_t[k - 1]) for k in ks if log_t[k - 1] != 0]
        h1_trace = self._classify("n_k/k", ks, density, "lim", large=1e6)
        if h1_trace.limit.is_infinite:
            h1 = Verdict.HOLDS
        elif h1_trace.converged:
            h1 = Verdict.FAILS
        else:
            h1 = Verdict.INCONCLUSIVE

        witnesses = {"h1": h1_trace}
        h2 = Verdict.INCONCLUSIVE
        if len(ratio_pairs) >= 4:
            h2_trace = self._classify("log s_k/log t_k", *zip(*ratio_pairs), mode="lim")
            witnesses["h2"] = h2_trace
            limit = h2_trace.limit
            if limit.is_finite and h2_trace.converged:
                h2 = Verdict.HOLDS if abs(limit.value - 1.0) <= 10 * self.rel_tol else Verdict.FAILS
            elif h2_trace.converged:
                h2 = Verdict.FAILS

        profile = self.growth_profile(triple, k_max)
        witnesses["alpha"] = profile.traces["alpha"]
        witnesses["beta"] = profile.traces["beta"]
        if profile.is_converged("alpha") and profile.is_converged("beta"):
            h3 = Verdict.HOLDS
        elif any(self._oscillates(profile.traces[name]) for name in ("alpha", "beta")):
            h3 = Verdict.FAILS
        else:
            h3 = Verdict.INCONCLUSIVE
        return HypothesisReport(h1=h1, h2=h2, h3=h3, witnesses=witnesses)

    def _oscillates(self, trace: LimitTrace) -> bool:
        """Хвост меняет направление не реже двух раз с размахом больше допуска."""
        tail = trace.values[-max(4, len(trace.values) // 2):]
        if not all(math.isfinite(v) for v in tail):
            return False
        steps = [b - a for a, b in zip(tail, tail[1:])]
        turns = sum(1 for a, b in zip(steps, steps[1:]) if a * b < 0)
        spread = max(tail) - min(tail)
        return turns >= 2 and spread > 10 * self.rel_tol * max(1.0, abs(max(tail)))

    # Функции

    def function_profile(self, func, n_max: Optional[int] = None) -> FunctionProfile:
        """
        Инварианты функции ψ на геометрическом горизонте до n_max.

        Все значения вычисляются в лог-шкале.
        """
        n_max = n_max or self.n_max
        generator = as_generator(func, "n")
        points = [n for n in sample_horizon(n_max) if n >= 2]

        with mpmath.workdps(WORKING_DPS):
            logs = [log_positive(generator, n=n) for n in points]
            linear = [value / n for value, n in zip(logs, points)]
            root = [value / mpmath.sqrt(n) for value, n in zip(logs, points)]
            excess = [value - mpmath.log(n) for value, n in zip(logs, points)]
            double_pairs = [(n, mpmath.log(value) / n) for value, n in zip(logs, points) if value > 0]

        traces = {
            "log_B": self._classify("liminf log ψ/n", points, linear, "liminf"),
            "log_C": self._classify("limsup log ψ/n", points, linear, "limsup"),
            "sqrt_scale": self._classify("limsup log ψ/√n", points, root, "limsup"),
            "superlinear": self._classify("log ψ - log n", points, excess, "lim", large=SUPERLINEAR_LOG),
        }
        if len(double_pairs) >= 4:
            traces["log_b"] = self._classify("liminf loglog ψ/n", *zip(*double_pairs), mode="liminf")
            traces["log_c"] = self._classify("limsup loglog ψ/n", *zip(*double_pairs), mode="limsup")

        log_b = traces["log_b"].limit if "log_b" in traces else ExtendedReal.unknown()
        log_c = traces["log_c"].limit if "log_c" in traces else ExtendedReal.unknown()
        superlinear = self._superlinear_verdict(traces["superlinear"])
        sqrt_scale = traces["sqrt_scale"]
        maxine = self._maxine(generator, sqrt_scale, n_max)

        profile = FunctionProfile(
            log_B_psi=traces["log_B"].limit,
            log_b_psi=log_b,
            log_C_psi=traces["log_C"].limit,
            log_c_psi=log_c,
            limit_flag=self._same_limit(traces["log_B"], traces["log_C"]),
            sqrt_scale_limsup=sqrt_scale.limit,
            linear_scale_limsup=traces["log_C"].limit,
            superlinear=superlinear,
            condition_ed=self._condition_ed(generator, points),
            condition_maxine=maxine,
            converged={name: trace.converged for name, trace in traces.items()},
            n_max=n_max,
            traces=traces,
        )
        logger.debug(
            f"function_profile {generator!r}: log B={profile.log_B_psi} log C={profile.log_C_psi} "
            f"√-scale={profile.sqrt_scale_limsup} ed={profile.condition_ed.value}"
        )
        return profile

    def _same_limit(self, lower: LimitTrace, upper: LimitTrace) -> bool:
        if not (lower.converged and upper.converged):
            return False
        if lower.limit.kind != upper.limit.kind:
            return False
        if lower.limit.is_finite:
            return abs(lower.limit.value - upper.limit.value) <= self.rel_tol * max(1.0, abs(upper.limit.value))
        return lower.limit.is_known

    @staticmethod
    def _superlinear_verdict(trace: LimitTrace) -> Verdict:
        if trace.limit.is_infinite:
            return Verdict.HOLDS
        if trace.converged:
            return Verdict.FAILS
        return Verdict.INCONCLUSIVE

    def _condition_ed(self, generator, points: Sequence[int]) -> Verdict:
        """
        log φ(n + ε√n) - log φ(n) ≥ δ для ε ∈ {1, 1/2, 1/4} на хвосте горизонта.
        """
        tail_points = [n for n in points if n > DENSE_HORIZON]
        if len(tail_points) < 8:
            tail_points = points[len(points) // 2:]
        quarter = max(2, len(tail_points) // 4)
        verdicts = []
        with mpmath.workdps(WORKING_DPS):
            for eps in ED_EPSILONS:
                gaps = [
                    log_positive(generator, n=n + eps * mpmath.sqrt(n)) - log_positive(generator, n=n)
                    for n in tail_points
                ]
                last = min(gaps[-quarter:])
                previous = min(gaps[-2 * quarter:-quarter])
                if last <= 0:
                    verdicts.append(Verdict.FAILS)
                elif last >= ED_FLOOR and last >= previous / 2:
                    verdicts.append(Verdict.HOLDS)
                elif last < previous / 2:
                    verdicts.append(Verdict.FAILS)
                else:
                    verdicts.append(Verdict.INCONCLUSIVE)
        if Verdict.FAILS in verdicts:
            return Verdict.FAILS
        if all(v == Verdict.HOLDS for v in verdicts):
            return Verdict.HOLDS
        return Verdict.INCONCLUSIVE

    def _maxine(self, generator, sqrt_scale: LimitTrace, n_max: int) -> Verdict:
        """
        max{|r(k) - r(m²)| : m² < k ≤ (m+1)²} → 0 для r(n) = log φ(n) - c√n.
        """
        if not (sqrt_scale.limit.is_finite and sqrt_scale.converged):
            return Verdict.INCONCLUSIVE
        c = mpmath.mpf(sqrt_scale.limit.value)
        top = int(min(math.isqrt(n_max) - 1, 4096))
        blocks = []
        m = 16
        while m <= top:
            blocks.append(m)
            m *= 2
        if len(blocks) < 3:
            return Verdict.INCONCLUSIVE

        deviations = []
        with mpmath.workdps(WORKING_DPS):

            def remainder(x):
                return log_positive(generator, n=x) - c * mpmath.sqrt(x)

            for m in blocks:
                base = remainder(m * m)
                stride = max(1, (2 * m + 1) // MAXINE_SAMPLES)
                ks = list(range(m * m + 1, (m + 1) ** 2 + 1, stride))
                if ks[-1] != (m + 1) ** 2:
                    ks.append((m + 1) ** 2)
                deviations.append(to_float(max(abs(remainder(k) - base) for k in ks)))

        if deviations[-1] <= MAXINE_TOL and deviations[-1] <= deviations[0] + MAXINE_TOL:
            return Verdict.HOLDS
        if deviations[-1] >= 10 * MAXINE_TOL and deviations[-1] >= deviations[0] / 2:
            return Verdict.FAILS
        return Verdict.INCONCLUSIVE

    # Классификация функций φ для S(φ)

    def classify_sum_function(
        self,
        func: Union[SumDescriptor, object],
        n_max: Optional[int] = None,
    ) -> SumClassification:
        """
        Ветка для множества S(φ).

        Теговые дескрипторы разбираются по семейству; для сырых функций
        используется профиль: масштаб √n, масштаб n, условия (ed) и (maxine).
        Неклассифицируемый вход даёт ветку indeterminate.
        """
        if isinstance(func, SumDescriptor):
            return self._classify_descriptor(func)

        profile = self.function_profile(func, n_max)
        diagnostics = {
            "superlinear": profile.superlinear.value,
            "sqrt_scale_limsup": str(profile.sqrt_scale_limsup),
            "linear_scale_limsup": str(profile.linear_scale_limsup),
            "condition_ed": profile.condition_ed.value,
            "condition_maxine": profile.condition_maxine.value,
        }
        if profile.superlinear != Verdict.HOLDS:
            note = "рост φ(n)/n → ∞ не подтверждён на горизонте"
            if profile.superlinear == Verdict.INCONCLUSIVE:
                note += "; φ(n)/n растёт, но медленнее любой проверяемой шкалы"
            return SumClassification(branch=DimensionBranch.INDETERMINATE, diagnostics=diagnostics, notes=[note])

        if profile.sqrt_scale_limsup.is_zero:
            return SumClassification(branch=DimensionBranch.FULL_DIMENSION, diagnostics=diagnostics)
        if profile.linear_scale_limsup.is_infinite:
            return SumClassification(branch=DimensionBranch.UPPER_HALF_LIMSUP, diagnostics=diagnostics)
        if profile.sqrt_scale_limsup.is_finite and profile.condition_maxine == Verdict.HOLDS:
            return SumClassification(
                branch=DimensionBranch.EXACT_HALF_COR2,
                parameters={"c": profile.sqrt_scale_limsup.value},
                diagnostics=diagnostics,
            )
        if profile.condition_ed == Verdict.HOLDS:
            return SumClassification(branch=DimensionBranch.UPPER_HALF_ED, diagnostics=diagnostics)
        return SumClassification(
            branch=DimensionBranch.INDETERMINATE,
            diagnostics=diagnostics,
            notes=["ни одна из веток не подтверждена на горизонте"],
        )

    @staticmethod
    def _classify_descriptor(descriptor: SumDescriptor) -> SumClassification:
        family = descriptor.family
        diagnostics = {"family": family.value, "expression": descriptor.expression()}
        if family == SumFamily.EXP_POWER:
            r = descriptor.r
            if r < 0.5:
                branch = DimensionBranch.FULL_DIMENSION
            elif r == 0.5:
                branch = DimensionBranch.EXACT_HALF_COR2
            else:
                branch = DimensionBranch.EXACT_HALF_POWER
            return SumClassification(branch=branch, parameters={"r": r}, diagnostics=diagnostics)
        if family == SumFamily.SQRT_PLUS_R1:
            return SumClassification(
                branch=DimensionBranch.EXACT_HALF_COR1, parameters={"c": descriptor.c}, diagnostics=diagnostics
            )
        if family == SumFamily.SQRT_PLUS_R2:
            return SumClassification(
                branch=DimensionBranch.EXACT_HALF_COR2, parameters={"c": descriptor.c}, diagnostics=diagnostics
            )
        if family == SumFamily.FLOOR_POWER:
            return SumClassification(
                branch=DimensionBranch.FAMILY_F_I,
                parameters={"c": descriptor.c, "d": descriptor.d, "r": descriptor.r},
                diagnostics=diagnostics,
            )
        return SumClassification(
            branch=DimensionBranch.FAMILY_F_II,
            parameters={"c": descriptor.c, "gamma": descriptor.gamma},
            diagnostics=diagnostics,
        )
