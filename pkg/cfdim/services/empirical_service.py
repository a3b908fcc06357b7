"""
Сервис переборных оракулов и эмпирических оценок размерности.

Зона ответственности:
- Подсчёт слов по двоичным полосам длин цилиндров
- Поиск полосы m с большим числом слов (проверка неравенства для полос)
- Канторовы покрытия: естественное, блочное и полное покрытие F_M
- Оценки Фалконера (снизу) и по покрытиям (сверху)
- Покрытия остановкой по длине, s_n(B) и подсчёт ящиков по выборке точек
"""

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import isqrt
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from loguru import logger
from scipy.special import zeta

from cfdim.models.empirical import (
    BoxCountResult,
    ConstructionParams,
    CoverLevel,
    CoverScheme,
    DyadicBandCount,
    EstimateTrace,
    LemmaMode,
    LemmaNPReport,
    StoppingCoverResult,
    WangWuBracket,
)
from cfdim.models.pressure import PressureMethod
from cfdim.models.profile import SequenceTriple
from cfdim.services.cf_core import continuant, continuants, cylinder_length, tail_length
from cfdim.services.expression import FLOOR_EXACT_LOG, WORKING_DPS, as_generator, exact_floor
from cfdim.services.pressure_service import PressureService, enumerate_log_sum
from cfdim.services.transfer_operator import TransferOperator
from cfdim.utils.error_handling import BudgetError, DegenerateError, DomainError
from cfdim.utils.logger import log_computation


LOG2 = math.log(2.0)
DEFAULT_NODE_CAP = 5_000_000
LEMMA_PRESSURE_DEPTH = 64
LEMMA_PRESSURE_CAP = 1024
# продления m_max по тренду и окно тренда в полосах
LEMMA_EXTENSIONS = 3
LEMMA_TREND_BANDS = 6
LEMMA_BAND_LIMIT = 16
WANG_WU_TAIL_LIMIT = 1e-6
WANG_WU_TOL = 1e-4
WANG_WU_ENUMERATION_DEPTH = 4
WANG_WU_ENUMERATION_WORDS = 1 << 20
BLOCK_SEARCH_WORDS = 50_000
DEFAULT_COARSEST_SCALE = 4
DEFAULT_FINEST_SCALE = 16


class _Digit:
    """Цифра покрытия: точное целое или mpf для огромных значений."""

    __slots__ = ("exact", "value")

    def __init__(self, value):
        self.exact = isinstance(value, int)
        self.value = value

    def log(self, shift: int = 0) -> float:
        if self.exact:
            return math.log(self.value + shift)
        with mpmath.workdps(30):
            return float(mpmath.log(self.value + shift))


def _band(denominator: int) -> int:
    """Номер полосы m: 2^{m-1} < D ≤ 2^m для D = q(q+q')."""
    return (denominator - 1).bit_length()


def _extend_with_ones(q: int, q_prev: int, remaining: int) -> Tuple[int, int]:
    for _ in range(remaining):
        q, q_prev = q + q_prev, q
    return q, q_prev


def _last_digit_count(q: int, q_prev: int, limit: int, cap: Optional[int]) -> int:
    """#{1 ≤ a ≤ cap : (aq+q')((a+1)q+q') ≤ limit}."""
    hi = isqrt(limit) // q + 1
    if cap is not None:
        hi = min(hi, cap)
    lo = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if (mid * q + q_prev) * ((mid + 1) * q + q_prev) <= limit:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _trend_crossing(margins: Dict[int, float], bands: int = LEMMA_TREND_BANDS) -> Optional[int]:
    """Полоса, где прямая по запасам последних полос пересекает ноль; None без роста."""
    if len(margins) < 3:
        return None
    ms = sorted(margins)[-bands:]
    slope, intercept = np.polyfit(ms, [margins[m] for m in ms], 1)
    if slope <= 0:
        return None
    return math.ceil(-intercept / slope)


def _log_continuant(digits: Sequence[_Digit]) -> Tuple[float, float]:
    """(log q_n, q_{n-1}/q_n) для слова с огромными цифрами."""
    if all(d.exact for d in digits):
        q_prev, q = 0, 1
        for d in digits:
            q_prev, q = q, d.value * q + q_prev
        return math.log(q), q_prev / q
    with mpmath.workdps(30):
        log_q = mpmath.mpf(0)
        ratio = mpmath.mpf(0)
        for d in digits:
            shifted = d.value + ratio
            log_q += mpmath.log(shifted)
            ratio = 1 / shifted
        return float(log_q), float(ratio)


class EmpiricalService:
    """Сервис переборных проверок и эмпирических оценок."""

    def __init__(
        self,
        pressure: Optional[PressureService] = None,
        node_cap: int = DEFAULT_NODE_CAP,
        threads: int = 1,
        seed: int = 0,
    ):
        self.pressure = pressure or PressureService()
        self.node_cap = node_cap
        self.threads = threads
        self.seed = seed

    # Полосы

    def band_counts(self, k: int, m_max: Optional[int] = None, digit_cap: Optional[int] = None) -> DyadicBandCount:
        """
        Число слов длины k в каждой полосе 2^{-m} ≤ |I_k| < 2^{-(m-1)}, m ≤ m_max.

        Перебор в глубину с точным отсечением: D = q_k(q_k+q_{k-1}) монотонно
        растёт по каждой цифре, поэтому ветвь отбрасывается, как только
        её продолжение единицами выходит за 2^{m_max}. Последняя цифра
        считается аналитически двоичным поиском.

        Raises:
            DomainError: k < 1 или m_max не задан для неограниченного алфавита
            BudgetError: число узлов дерева превысило node_cap
        """
        if k < 1:
            raise DomainError(f"Глубина k={k} должна быть натуральной")
        if digit_cap is not None and digit_cap < 1:
            raise DomainError(f"M={digit_cap} должно быть натуральным")
        if m_max is None:
            if digit_cap is None:
                raise DomainError("Для неограниченного алфавита нужен m_max")
            q, q_prev = 1, 0
            for _ in range(k):
                q, q_prev = digit_cap * q + q_prev, q
            m_max = _band(q * (q + q_prev))
        started = time.perf_counter()
        limit = 1 << m_max

        def explore(q: int, q_prev: int, depth: int, table: Dict[int, int], nodes: List[int]) -> None:
            nodes[0] += 1
            if nodes[0] > self.node_cap:
                raise BudgetError(f"Перебор полос превысил {self.node_cap} узлов (k={k}, m_max={m_max})")
            if depth == k - 1:
                first = _band((q + q_prev) * (2 * q + q_prev))
                previous = 0
                for m in range(max(first, 1), m_max + 1):
                    current = _last_digit_count(q, q_prev, 1 << m, digit_cap)
                    if current > previous:
                        table[m] = table.get(m, 0) + current - previous
                    previous = current
                    if digit_cap is not None and current == digit_cap:
                        break
                return
            for a in itertools.count(1):
                if digit_cap is not None and a > digit_cap:
                    break
                child = (a * q + q_prev, q)
                low_q, low_prev = _extend_with_ones(child[0], child[1], k - depth - 1)
                if low_q * (low_q + low_prev) > limit:
                    break
                explore(child[0], child[1], depth + 1, table, nodes)

        def subtree(first_digit: int) -> Tuple[Dict[int, int], int]:
            table: Dict[int, int] = {}
            nodes = [0]
            explore(first_digit, 1, 1, table, nodes)
            return table, nodes[0]

        table: Dict[int, int] = {}
        nodes = 0
        if k == 1:
            counter = [0]
            explore(1, 0, 0, table, counter)
            nodes = counter[0]
        else:
            firsts = []
            for a in itertools.count(1):
                if digit_cap is not None and a > digit_cap:
                    break
                low_q, low_prev = _extend_with_ones(a, 1, k - 1)
                if low_q * (low_q + low_prev) > limit:
                    break
                firsts.append(a)
            if self.threads > 1 and len(firsts) > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    parts = list(pool.map(subtree, firsts))
            else:
                parts = [subtree(a) for a in firsts]
            for part, visited in parts:
                nodes += visited
                for m, count in part.items():
                    table[m] = table.get(m, 0) + count
            if nodes > self.node_cap:
                raise BudgetError(f"Перебор полос превысил {self.node_cap} узлов (k={k}, m_max={m_max})")

        log_computation("band_counts", int((time.perf_counter() - started) * 1000), f"k={k} cap={digit_cap} nodes={nodes}")
        return DyadicBandCount(k=k, digit_cap=digit_cap, m_max=m_max, table=dict(sorted(table.items())), nodes=nodes)

    def verify_lemma_np(
        self,
        theta: float,
        eps: float,
        k: int,
        mode: LemmaMode = LemmaMode.FULL,
        digit_cap: Optional[int] = None,
        m_max: Optional[int] = None,
    ) -> LemmaNPReport:
        """
        Наименьшая полоса m, где слов больше порога.

        Полный алфавит: N_m(k) > 2^{(m+1)θ} e^{(P(θ)-ε)k}; в порог подставляется
        верхний конец скобки P(θ) при M = LEMMA_PRESSURE_CAP, а если её хвост δ_M
        больше ε, то оценка оператора (pressure_certified=False).
        Цифры до M: M_m(k) > 2^{(m+1)θ}; при P_M(θ) < 0 (θ > dim F_M) отчёт
        помечается above_dimension.

        Если полосы нет до m_max, граница m_max продлевается до точки, где
        линейный тренд запаса по последним полосам пересекает ноль. Исчерпание
        лимита узлов при продлении и отсутствие полосы возвращаются отчётом.
        """
        mode = LemmaMode(mode)
        notes: List[str] = []
        certified, above_dimension = True, False
        if mode == LemmaMode.FULL:
            if not 0.5 < theta < 1.0:
                raise DomainError(f"theta={theta} вне (1/2, 1)")
            bracket = self.pressure.pressure_full(theta, LEMMA_PRESSURE_CAP, LEMMA_PRESSURE_DEPTH)
            if not 0 < eps < bracket.lower:
                raise DomainError(f"Требуется 0 < ε < {bracket.lower:.6g} (нижняя оценка P(θ)), получено ε={eps}")
            bound = bracket.upper
            if bracket.tail > eps:
                estimate = self.pressure.pressure_unbounded(theta, LEMMA_PRESSURE_DEPTH).upper
                if estimate < bound:
                    notes.append(
                        f"хвост δ_M = {bracket.tail:.3g} > ε: в пороге оценка оператора {estimate:.6g} "
                        f"вместо сертифицированной {bound:.6g}"
                    )
                    bound, certified = estimate, False
            m_max = m_max or 3 * k
            offset = (bound - eps) * k
        else:
            if digit_cap is None:
                raise DomainError("Режим restricted требует M")
            if not 0 < theta < 1.0:
                raise DomainError(f"theta={theta} вне (0, 1)")
            bound = self.pressure.pressure_restricted(
                theta, digit_cap, LEMMA_PRESSURE_DEPTH, PressureMethod.OPERATOR_ITERATION
            ).upper
            if bound < 0:
                above_dimension = True
                notes.append(f"P_M(θ) ≤ {bound:.4g} < 0: θ больше dim F_{digit_cap}, при больших k полосы нет")
            offset = 0.0

        cap = digit_cap if mode == LemmaMode.RESTRICTED else None
        # без m_max в режиме restricted перебираются все слова
        extendable = m_max is not None
        counts = self.band_counts(k, m_max, cap)
        margins = {m: math.log(count) - ((m + 1) * theta * LOG2 + offset) for m, count in counts.table.items()}
        found_m = min((m for m, margin in margins.items() if margin > 0), default=None)
        predicted = _trend_crossing(margins)
        budget_exhausted = False

        for _ in range(LEMMA_EXTENSIONS):
            if not extendable or found_m is not None or predicted is None or predicted <= counts.m_max:
                break
            if predicted > LEMMA_BAND_LIMIT * k:
                notes.append(f"тренд запаса даёт m ≈ {predicted}, больше {LEMMA_BAND_LIMIT}k: продление не выполнялось")
                break
            extended = predicted + 2
            try:
                counts = self.band_counts(k, extended, cap)
            except BudgetError as e:
                budget_exhausted = True
                notes.append(f"продление до m_max={extended} остановлено: {e.message}")
                break
            margins = {m: math.log(count) - ((m + 1) * theta * LOG2 + offset) for m, count in counts.table.items()}
            found_m = min((m for m, margin in margins.items() if margin > 0), default=None)
            predicted = _trend_crossing(margins)

        best_m = max(margins, key=margins.get, default=None)
        if found_m is None:
            logger.info(
                f"verify_lemma_np: no band for theta={theta}, k={k}, mode={mode.value}, "
                f"m_max={counts.m_max}, predicted={predicted}"
            )
        return LemmaNPReport(
            theta=theta,
            eps=eps,
            k=k,
            mode=mode,
            digit_cap=digit_cap,
            found=found_m is not None,
            m=found_m,
            m_max=counts.m_max,
            pressure_bound=bound,
            pressure_certified=certified,
            above_dimension=above_dimension,
            best_m=best_m,
            best_log_ratio=margins[best_m] if best_m is not None else -math.inf,
            predicted_m=predicted if found_m is None else None,
            budget_exhausted=budget_exhausted,
            table=counts.table,
            notes=notes,
        )

    # Покрытия

    def bounded_cover(self, digit_cap: int, depth: int) -> List[CoverLevel]:
        """Покрытие F_M всеми цилиндрами уровней 1..depth."""
        if digit_cap < 2:
            raise DegenerateError(f"M={digit_cap}: F_M должно иметь хотя бы две ветви")
        if depth < 1:
            raise DomainError(f"Глубина {depth} должна быть натуральной")
        levels = []
        for k in range(1, depth + 1):
            smallest = continuants([digit_cap] * k)
            gap = tail_length(smallest, digit_cap)
            diameter = cylinder_length([1] * k)
            total = digit_cap**k
            levels.append(
                CoverLevel(
                    level=k,
                    children_per_parent=digit_cap,
                    min_gap=gap,
                    max_diameter=diameter,
                    total_count=total,
                    log_min_gap=-math.log(gap.denominator),
                    log_max_diameter=-math.log(diameter.denominator),
                    log_children=math.log(digit_cap),
                    log_total_count=k * math.log(digit_cap),
                    depth=k,
                )
            )
        return levels

    def _special_digits(self, triple: SequenceTriple, levels: Optional[int] = None, stop_position: Optional[int] = None):
        """
        Позиции n_k и допустимые цифры (⌊s_k⌋, ⌊s_k+t_k⌋].

        Вычисляются уровни k = 1..levels+1 либо, при stop_position, все
        уровни с n_k ≤ stop_position.
        """
        n_gen = as_generator(triple.n_gen, "k")
        s_gen = as_generator(triple.s_gen, "k")
        t_gen = as_generator(triple.t_gen, "k")
        positions, ranges = [], []
        with mpmath.workdps(WORKING_DPS):
            for k in itertools.count(1):
                if levels is not None and k > levels + 1:
                    break
                n_k = int(exact_floor(n_gen.value(k=k)))
                if stop_position is not None and n_k > stop_position:
                    break
                if n_k < 1 or (positions and n_k <= positions[-1]):
                    raise DomainError(f"Позиции n_k должны быть натуральными и возрастать (k={k}, n_k={n_k})")
                if n_k > self.node_cap:
                    raise BudgetError(f"n_{k}={n_k} превышает лимит {self.node_cap}")
                s = s_gen.value(k=k, n=n_k, n_k=n_k)
                t = t_gen.value(k=k, n=n_k, n_k=n_k)
                if s < 0 or t <= 0:
                    raise DomainError(f"Требуется s_k ≥ 0 и t_k > 0 при k={k}")
                if mpmath.log(s + t) < FLOOR_EXACT_LOG:
                    low, high = int(exact_floor(s)), int(exact_floor(s + t))
                    count = high - low
                    lowest, highest = _Digit(low + 1), _Digit(high)
                    log_count = math.log(count) if count > 0 else -math.inf
                else:
                    count = None
                    lowest, highest = _Digit(exact_floor(s) + 1), _Digit(exact_floor(s + t))
                    log_count = float(mpmath.log(t))
                if (count is not None and count < 2) or log_count < LOG2:
                    raise DegenerateError(
                        f"На уровне k={k} меньше двух допустимых цифр в (s_k, s_k+t_k]",
                        {"k": k, "count": count},
                    )
                positions.append(n_k)
                ranges.append((lowest, highest, count, log_count))
        return positions, ranges

    def build_cover(
        self,
        triple: SequenceTriple,
        digit_bound: int,
        levels: int,
        scheme: CoverScheme = CoverScheme.NATURAL,
        params: Optional[ConstructionParams] = None,
    ) -> List[CoverLevel]:
        """
        Канторово покрытие множества с цифрами из (s_k, s_k+t_k] на позициях n_k.

        Естественная схема: на прочих позициях цифры от 1 до M. Блочная схема:
        промежутки заполняются блоками длины k_0 из полосы m_0 и остатком
        из единиц. Минимальный зазор уровня k равен длине отброшенного хвоста
        I(w, a > U) при наибольшем q_{n_k}, где U верхняя граница следующей цифры.

        Raises:
            DegenerateError: меньше двух цифр на позиции n_k
            BudgetError: n_K превышает лимит узлов
        """
        if digit_bound < 1:
            raise DomainError(f"M={digit_bound} должно быть натуральным")
        if levels < 1:
            raise DomainError(f"Число уровней {levels} должно быть натуральным")
        scheme = CoverScheme(scheme)
        positions, ranges = self._special_digits(triple, levels)

        if scheme == CoverScheme.BLOCK:
            params = params or self.discover_block_params(digit_bound)
            params = ConstructionParams.decompose(positions[:levels], params.k_0, params.m_0)
            return self._block_cover(positions, ranges, digit_bound, levels, params)
        return self._natural_cover(positions, ranges, digit_bound, levels)

    def _natural_cover(self, positions, ranges, digit_bound: int, levels: int) -> List[CoverLevel]:
        low_word: List[_Digit] = []
        high_word: List[_Digit] = []
        one, top = _Digit(1), _Digit(digit_bound)
        result = []
        log_total, total = 0.0, 1
        previous = 0
        for k in range(levels):
            free = positions[k] - previous - 1
            lowest, highest, count, log_count = ranges[k]
            low_word += [one] * free + [lowest]
            high_word += [top] * free + [highest]
            previous = positions[k]

            log_children = log_count + free * math.log(digit_bound)
            children = count * digit_bound**free if count is not None else None
            log_total += log_children
            total = total * children if (children is not None and total is not None) else None

            bound = ranges[k + 1][1] if positions[k + 1] == positions[k] + 1 else top

            exact = all(d.exact for d in high_word) and bound.exact
            if exact:
                q_high = continuant(d.value for d in high_word)
                q_high_prev = continuant(d.value for d in high_word[:-1])
                q_low = continuant(d.value for d in low_word)
                q_low_prev = continuant(d.value for d in low_word[:-1])
                gap = Fraction(1, q_high * ((bound.value + 1) * q_high + q_high_prev))
                diameter = Fraction(1, q_low * (q_low + q_low_prev))
                log_gap = -math.log(gap.denominator)
                log_diameter = -math.log(diameter.denominator)
            else:
                gap = diameter = None
                log_q, ratio = _log_continuant(high_word)
                with mpmath.workdps(30):
                    log_gap = -(2 * log_q + float(mpmath.log(bound.value + 1 + ratio)))
                log_q_low, ratio_low = _log_continuant(low_word)
                log_diameter = -(2 * log_q_low + math.log1p(ratio_low))

            result.append(
                CoverLevel(
                    level=k + 1,
                    children_per_parent=children,
                    min_gap=gap,
                    max_diameter=diameter,
                    total_count=total,
                    log_min_gap=log_gap,
                    log_max_diameter=log_diameter,
                    log_children=log_children,
                    log_total_count=log_total,
                    depth=positions[k],
                )
            )
        return result

    def discover_block_params(self, digit_bound: int, block_lengths: Sequence[int] = (2, 3, 4, 5, 6)) -> ConstructionParams:
        """
        Подобрать (k_0, m_0) по таблицам полос: наибольшее log N_m(k_0) / (m log 2).
        """
        best: Optional[Tuple[float, int, int]] = None
        for k_0 in block_lengths:
            if digit_bound**k_0 > BLOCK_SEARCH_WORDS:
                break
            table = self.band_counts(k_0, None, digit_bound).table
            for m, count in table.items():
                if count < 2:
                    continue
                score = math.log(count) / (m * LOG2)
                if best is None or score > best[0]:
                    best = (score, k_0, m)
        if best is None:
            raise DegenerateError(f"Нет полосы с двумя и более блоками при M={digit_bound}")
        logger.debug(f"Block params for M={digit_bound}: k_0={best[1]} m_0={best[2]} score={best[0]:.4f}")
        return ConstructionParams(k_0=best[1], m_0=best[2])

    def _block_cover(self, positions, ranges, digit_bound: int, levels: int, params: ConstructionParams) -> List[CoverLevel]:
        """
        Блочная схема в лог-шкале.

        q(uv) ≥ q(u)q(v) и q(uv) ≤ 2q(u)q(v) дают оценки диаметра сверху
        и зазора снизу; для блока из полосы m_0 верно 2^{m_0-2} ≤ q² ≤ 2^{m_0}.
        """
        block_count = self.band_counts(params.k_0, None, digit_bound).count(params.m_0)
        if block_count < 2:
            raise DegenerateError(f"В полосе m_0={params.m_0} меньше двух блоков длины {params.k_0}")
        log_block_low = 0.5 * (params.m_0 - 2) * LOG2
        log_block_high = 0.5 * params.m_0 * LOG2

        result = []
        log_total, log_q_low, log_q_high = 0.0, 0.0, 0.0
        for k in range(levels):
            blocks, rest = params.decomposition[k]
            lowest, highest, count, log_count = ranges[k]
            log_ones = math.log(continuant([1] * rest)) if rest else 0.0
            log_children = log_count + blocks * math.log(block_count)
            log_total += log_children
            log_q_low += blocks * log_block_low + log_ones + lowest.log()
            pieces = blocks + (1 if rest else 0) + 1
            log_q_high += blocks * log_block_high + log_ones + highest.log() + pieces * LOG2

            bound = ranges[k + 1][1] if positions[k + 1] == positions[k] + 1 else _Digit(digit_bound)
            log_gap = -(2 * log_q_high + bound.log(shift=2))
            result.append(
                CoverLevel(
                    level=k + 1,
                    log_min_gap=log_gap,
                    log_max_diameter=-2 * log_q_low,
                    log_children=log_children,
                    log_total_count=log_total,
                    depth=positions[k],
                )
            )
        return result

    # Оценки

    @staticmethod
    def _trace(name: str, levels: List[int], values: List[float], warnings: List[str]) -> EstimateTrace:
        running = []
        for value in reversed(values):
            running.append(min(value, running[-1]) if running else value)
        running.reverse()
        tail = values[-max(1, len(values) // 4):]
        return EstimateTrace(
            name=name,
            levels=levels,
            values=values,
            running_liminf=running,
            final=min(tail),
            warnings=warnings,
        )

    def falconer_estimate(self, levels: Sequence[CoverLevel]) -> EstimateTrace:
        """
        Нижние оценки log(m_1⋯m_{k-1}) / (-log(m_k ε_k)) и их нижний предел.

        Raises:
            DomainError: меньше двух уровней, m_k < 2 или зазоры не убывают
        """
        if len(levels) < 2:
            raise DomainError("Оценке Фалконера нужны хотя бы два уровня")
        for previous, level in zip(levels, levels[1:]):
            if not level.log_min_gap < previous.log_min_gap:
                raise DomainError(f"Зазоры не убывают на уровне {level.level}")
        if any(level.log_children < LOG2 - 1e-12 for level in levels):
            raise DomainError("Требуется m_k ≥ 2 на всех уровнях")

        numbers, values = [], []
        accumulated = levels[0].log_children
        for level in levels[1:]:
            denominator = -(level.log_children + level.log_min_gap)
            if denominator <= 0:
                raise DomainError(f"m_k ε_k ≥ 1 на уровне {level.level}")
            numbers.append(level.level)
            values.append(accumulated / denominator)
            accumulated += level.log_children
        return self._trace("falconer", numbers, values, [])

    def covering_estimate(self, levels: Sequence[CoverLevel]) -> EstimateTrace:
        """Верхние оценки log ♯E_k / (-log δ_k) и их нижний предел."""
        if not levels:
            raise DomainError("Нет уровней покрытия")
        warnings = []
        diameters = [level.log_max_diameter for level in levels]
        if any(b >= a for a, b in zip(diameters, diameters[1:])) or diameters[-1] >= 0:
            warnings.append("диаметры покрытия не убывают к нулю")
            logger.warning("covering_estimate: diameters are not shrinking")
        values = []
        for level in levels:
            if level.log_max_diameter >= 0:
                values.append(math.inf if level.log_total_count > 0 else 0.0)
            else:
                values.append(level.log_total_count / -level.log_max_diameter)
        return self._trace("covering", [level.level for level in levels], values, warnings)

    def stopping_cover_counts(self, digit_cap: int, m_values: Sequence[int]) -> StoppingCoverResult:
        """
        Число минимальных цилиндров F_M длины < 2^{-m}.

        Слово w останавливается на масштабе m, если |I(w)| < 2^{-m} ≤ |I(родителя)|.
        Наклон log₂ числа слов по m даёт θ_M.
        """
        m_values = sorted(set(int(m) for m in m_values))
        if digit_cap < 1 or not m_values or m_values[0] < 0:
            raise DomainError("Нужны M ≥ 1 и неотрицательные масштабы")
        if len(m_values) < 2:
            raise DomainError("Нужны хотя бы два масштаба")
        top = m_values[-1]
        limit = 1 << top
        difference = [0] * (top + 2)
        nodes = 0
        stack = [(1, 0, 1)]  # (q, q_prev, D родителя)
        while stack:
            q, q_prev, parent = stack.pop()
            for a in range(1, digit_cap + 1):
                child_q, child_prev = a * q + q_prev, q
                denominator = child_q * (child_q + child_prev)
                first = _band(parent)
                last = _band(denominator) - 1
                if first <= min(last, top):
                    difference[first] += 1
                    difference[min(last, top) + 1] -= 1
                if denominator <= limit:
                    nodes += 1
                    if nodes > self.node_cap:
                        raise BudgetError(f"Покрытие остановкой превысило {self.node_cap} узлов")
                    stack.append((child_q, child_prev, denominator))
        counts_by_m = list(itertools.accumulate(difference))
        counts = [counts_by_m[m] for m in m_values]
        slopes = [
            math.log2(counts[i + 1] / counts[i]) / (m_values[i + 1] - m_values[i])
            for i in range(len(m_values) - 1)
        ]
        estimate = math.log2(counts[-1] / counts[0]) / (m_values[-1] - m_values[0])
        return StoppingCoverResult(
            digit_cap=digit_cap,
            m_values=m_values,
            counts=counts,
            slopes=slopes,
            estimate=estimate,
            diagnostics={"nodes": nodes},
        )

    def wang_wu_s_n(self, B: float, n: int, digit_truncation: int = 64) -> WangWuBracket:
        """
        Скобка для s_n(B) = inf{ρ: f_n(ρ,B) < 1}, f_n = B^{-nρ} Σ q_n^{-2ρ}.

        Цифры до A суммируются оператором переноса явно, хвост a > A через
        ряд Тейлора с дзета-функцией Гурвица; остаток ряда оценивается
        величиной n·ζ(2ρ+p+1, A+1). Это оценка, а не строгая граница: при
        малых n её проверяет wang_wu_enumerated.

        Raises:
            DomainError: B ≤ 1, n < 1, остаток больше 1e-6 (нужно увеличить A)
                или s_n(B) > 1
        """
        if not B > 1:
            raise DomainError(f"B={B} должно быть больше 1")
        if n < 1:
            raise DomainError(f"n={n} должно быть натуральным")
        order = self.pressure.interpolation_order

        def log_f(rho: float) -> float:
            return self.wang_wu_operator_log_f(rho, B, n, digit_truncation)

        def tail(rho: float) -> float:
            return n * float(zeta(2.0 * rho + order + 1, digit_truncation + 1))

        if tail(0.5) > WANG_WU_TAIL_LIMIT:
            raise DomainError(
                f"Остаток хвоста {tail(0.5):.2e} > {WANG_WU_TAIL_LIMIT}: увеличьте A={digit_truncation}"
            )
        if log_f(1.0) >= tail(1.0):
            raise DomainError(f"f_{n}(1, {B}) ≥ 1: s_n(B) > 1")

        lo, hi, evaluations = 0.5, 1.0, 1
        while hi - lo > WANG_WU_TOL:
            mid = 0.5 * (lo + hi)
            value = log_f(mid)
            evaluations += 1
            if abs(value) <= tail(mid):
                logger.debug(f"wang_wu_s_n: undecided at rho={mid}")
                break
            if value > 0:
                lo = mid
            else:
                hi = mid
        return WangWuBracket(
            B=B,
            n=n,
            digit_truncation=digit_truncation,
            lower=lo,
            upper=hi,
            tail_bound=tail(lo),
            evaluations=evaluations,
        )

    def wang_wu_operator_log_f(self, rho: float, B: float, n: int, digit_truncation: int = 64) -> float:
        """log f_n(ρ,B) оператором переноса с A явными цифрами."""
        operator = TransferOperator(
            rho,
            None,
            grid_size=self.pressure.grid_size,
            interpolation_order=self.pressure.interpolation_order,
            explicit_digits=digit_truncation,
        )
        return operator.log_sum(n) - n * rho * math.log(B)

    @staticmethod
    def wang_wu_enumeration_cap(n: int, words: int = WANG_WU_ENUMERATION_WORDS) -> int:
        """Наибольшее M с M^n ≤ words."""
        cap = max(1, int(words ** (1.0 / n)))
        while (cap + 1) ** n <= words:
            cap += 1
        while cap > 1 and cap**n > words:
            cap -= 1
        return cap

    def wang_wu_enumerated_log_f(self, rho: float, B: float, n: int, digit_cap: int) -> Tuple[float, float]:
        """
        Строгие границы log f_n(ρ,B) перебором слов с цифрами до M.

        Слова с хотя бы одной цифрой больше M дают не больше
        ζ(2ρ)^n - H_M(2ρ)^n, H_M(s) = Σ_{a≤M} a^{-s}, так как q_n ≥ Π a_i.
        """
        if not rho > 0.5:
            raise DomainError(f"ρ={rho} ≤ 1/2: ряд расходится")
        s = 2.0 * rho
        log_truncated = enumerate_log_sum(rho, digit_cap, n, self.pressure.enumeration_cap, self.threads)
        full = float(zeta(s, 1))
        head = full - float(zeta(s, digit_cap + 1))
        tail = full**n - head**n
        shift = n * rho * math.log(B)
        upper = log_truncated + math.log1p(tail * math.exp(-log_truncated))
        return log_truncated - shift, upper - shift

    def wang_wu_enumerated(self, B: float, n: int, digit_cap: Optional[int] = None) -> WangWuBracket:
        """
        Строгая скобка для s_n(B) при малых n без оператора переноса.

        Знак log f_n в точке ρ принимается, только если обе границы
        wang_wu_enumerated_log_f по одну сторону от нуля; иначе бисекция
        останавливается и возвращает текущий отрезок.

        Raises:
            DomainError: B ≤ 1, n вне [1, WANG_WU_ENUMERATION_DEPTH] или s_n(B) ≥ 1
        """
        if not B > 1:
            raise DomainError(f"B={B} должно быть больше 1")
        if not 1 <= n <= WANG_WU_ENUMERATION_DEPTH:
            raise DomainError(f"Перебор для s_n доступен при 1 ≤ n ≤ {WANG_WU_ENUMERATION_DEPTH}, получено n={n}")
        digit_cap = digit_cap or self.wang_wu_enumeration_cap(n)
        if digit_cap < 1:
            raise DomainError(f"M={digit_cap} должно быть натуральным")

        if self.wang_wu_enumerated_log_f(1.0, B, n, digit_cap)[0] >= 0:
            raise DomainError(f"f_{n}(1, {B}) ≥ 1: s_n(B) ≥ 1")
        lo, hi, evaluations = 0.5, 1.0, 1
        tail_width = 0.0
        while hi - lo > WANG_WU_TOL:
            mid = 0.5 * (lo + hi)
            lower, upper = self.wang_wu_enumerated_log_f(mid, B, n, digit_cap)
            evaluations += 1
            if lower > 0:
                lo = mid
            elif upper < 0:
                hi = mid
            else:
                tail_width = upper - lower
                logger.debug(f"wang_wu_enumerated: undecided at rho={mid}, width={tail_width:.3e}")
                break
        return WangWuBracket(
            B=B,
            n=n,
            digit_truncation=digit_cap,
            lower=lo,
            upper=hi,
            tail_bound=tail_width,
            evaluations=evaluations,
            method=PressureMethod.ENUMERATE,
            certified=True,
        )

    def boxcount_sample(
        self,
        source: Union[int, Sequence[int], SequenceTriple],
        count: int = 100_000,
        depth: int = 20,
        scales: Optional[Sequence[float]] = None,
        seed: Optional[int] = None,
        digit_bound: int = 2,
    ) -> BoxCountResult:
        """
        Наклон log N(δ) против -log δ по случайным точкам.

        Цифры выбираются равномерно из допустимого множества на каждой позиции:
        source задаёт M (цифры 1..M), явный набор цифр или тройку
        последовательностей (на позициях n_k цифры из (s_k, s_k+t_k], на
        прочих от 1 до digit_bound).

        Raises:
            DomainError: масштабы мельче разрешения выборки
        """
        seed = self.seed if seed is None else seed
        rng = np.random.default_rng(seed)
        choices = self._position_digits(source, depth, digit_bound)

        columns = [
            rng.integers(digits[0], digits[1] + 1, size=count).astype(float)
            if isinstance(digits, tuple)
            else rng.choice(np.asarray(digits, dtype=float), size=count)
            for digits in choices
        ]
        x = np.zeros(count)
        for column in reversed(columns):
            x = 1.0 / (column + x)

        resolution = float(cylinder_length([digits[0] for digits in choices]))
        if scales is None:
            finest = min(DEFAULT_FINEST_SCALE, int(-math.log2(max(resolution, 1e-300))) - 2)
            if finest < DEFAULT_COARSEST_SCALE + 2:
                raise DomainError(f"Глубина {depth} слишком мала для подсчёта ящиков")
            scales = [2.0**-m for m in range(DEFAULT_COARSEST_SCALE, finest + 1)]
        scales = sorted(float(s) for s in scales)
        if scales[0] < resolution:
            raise DomainError(f"Масштаб {scales[0]:.3g} мельче разрешения 1/q² = {resolution:.3g}")

        counts = [int(np.unique(np.floor(x / scale)).size) for scale in scales]
        log_inverse = -np.log(np.asarray(scales))
        slope, intercept = np.polyfit(log_inverse, np.log(np.asarray(counts, dtype=float)), 1)
        return BoxCountResult(
            slope=float(slope),
            intercept=float(intercept),
            scales=scales,
            counts=counts,
            points=count,
            depth=depth,
            seed=seed,
        )

    def _position_digits(self, source, depth: int, digit_bound: int) -> List[Union[Tuple[int, int], List[int]]]:
        """Допустимые цифры по позициям: отрезок (lo, hi) или явный список."""
        if depth < 1:
            raise DomainError(f"Глубина {depth} должна быть натуральной")
        if isinstance(source, SequenceTriple):
            columns: List[Union[Tuple[int, int], List[int]]] = [(1, digit_bound)] * depth
            positions, ranges = self._special_digits(source, stop_position=depth)
            for position, (lowest, highest, _, _) in zip(positions, ranges):
                if not (lowest.exact and highest.exact) or highest.value > 2**53:
                    raise DomainError(f"Цифры на позиции {position} слишком велики для выборки")
                columns[position - 1] = (lowest.value, highest.value)
            return columns
        if isinstance(source, int):
            if source < 1:
                raise DomainError(f"M={source} должно быть натуральным")
            return [(1, source)] * depth
        digits = sorted(set(int(a) for a in source))
        if not digits or digits[0] < 1:
            raise DomainError("Набор цифр должен состоять из натуральных чисел")
        return [digits] * depth
