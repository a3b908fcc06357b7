"""
Классификация пределов по конечным следам.

След (индексы, значения) относится к одному из видов: ноль, конечный предел,
бесконечность или неопределённость. Конечные пределы подтверждаются
критерием Коши на хвосте или экстраполяцией Ричардсона по 1/индекс на двух
согласованных окнах.
"""

import math
from typing import List, Optional, Sequence

import mpmath
import numpy as np

from cfdim.models.profile import ExtendedReal, LimitTrace


ZERO_FLOOR = 1e-6
SLOPE_FLOOR = 0.05
LARGE_VALUE = 1e12
RELATIVE_TOL = 1e-3
RICHARDSON_DPS = 60


def to_float(value) -> float:
    """mpf → float с переполнением в ±inf."""
    try:
        result = float(value)
    except OverflowError:
        return math.inf if value > 0 else -math.inf
    return result


def richardson_limit(values: Sequence, first_index: int = 1, order: int = 12) -> Optional[float]:
    """
    Экстраполяция Ричардсона предела A(n) при n → ∞.

    values[i] = A(first_index + i). Используется окно индексов [N, 2N],
    где N = order (уменьшается, если данных не хватает).

    Returns:
        оценка предела или None, если данных мало
    """
    last_index = first_index + len(values) - 1
    order = min(order, (last_index - 1) // 2)
    if order < 2 or order < first_index:
        return None
    with mpmath.workdps(RICHARDSON_DPS):
        seq = []
        for j in range(2 * order + 2):
            i = min(max(j - first_index, 0), len(values) - 1)
            seq.append(mpmath.mpf(values[i]))
        estimate, _ = mpmath.richardson(seq)
        return to_float(estimate)


def _loglog_slope(indices: Sequence[float], values: Sequence) -> Optional[float]:
    if len(values) < 3 or any(v <= 0 for v in values) or any(i <= 0 for i in indices):
        return None
    x = np.log(np.asarray(indices, dtype=float))
    y = np.array([to_float(mpmath.log(v)) for v in values])
    if not np.all(np.isfinite(y)) or np.ptp(x) == 0:
        return None
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def _prefix(values: List, pick) -> List:
    result, current = [], None
    for v in values:
        current = v if current is None else pick(current, v)
        result.append(current)
    return result


def _suffix(values: List, pick) -> List:
    return list(reversed(_prefix(list(reversed(values)), pick)))


def _nondecreasing(values: Sequence) -> bool:
    return all(a <= b for a, b in zip(values, values[1:]))


def _nonincreasing(values: Sequence) -> bool:
    return all(a >= b for a, b in zip(values, values[1:]))


def classify_limit(
    name: str,
    indices: Sequence[float],
    values: Sequence,
    mode: str = "lim",
    zero_floor: float = ZERO_FLOOR,
    slope_floor: float = SLOPE_FLOOR,
    large: float = LARGE_VALUE,
    rel_tol: float = RELATIVE_TOL,
    consecutive: bool = False,
) -> LimitTrace:
    """
    Классифицировать lim, liminf или limsup по следу.

    Args:
        name: имя величины для отчёта
        indices: индексы (k или n), возрастающие
        values: значения (float или mpf)
        mode: "lim", "liminf" или "limsup"
        zero_floor: порог нуля для хвоста
        slope_floor: порог наклона в лог-лог координатах
        large: порог бесконечности
        rel_tol: относительный допуск критерия Коши
        consecutive: индексы идут подряд с шагом 1 (разрешает Ричардсона)

    Returns:
        LimitTrace с меткой предела и флагом сходимости
    """
    with mpmath.workdps(RICHARDSON_DPS):
        values = [mpmath.mpf(v) for v in values]
    indices = [float(i) for i in indices]
    trace = dict(name=name, indices=indices, values=[to_float(v) for v in values])
    count = len(values)
    if count < 4:
        return LimitTrace(**trace, limit=ExtendedReal.unknown(), diagnostics={"reason": "short trace"})

    tail_len = max(3, count // 4)
    tail, tail_idx = values[-tail_len:], indices[-tail_len:]
    half = values[-max(4, count // 2):]

    if mode == "liminf":
        stat = min
        zero_env, inf_env = _prefix(tail, min), _suffix(tail, min)
    elif mode == "limsup":
        stat = max
        zero_env, inf_env = _suffix(tail, max), _prefix(tail, max)
    else:
        stat = None
        zero_env = inf_env = tail
    tail_stat = stat(tail) if stat else tail[-1]
    half_stat = stat(half) if stat else half[-1]

    zero_slope = _loglog_slope(tail_idx, zero_env)
    inf_slope = _loglog_slope(tail_idx, inf_env)
    diagnostics = {
        "mode": mode,
        "tail_stat": to_float(tail_stat),
        "half_stat": to_float(half_stat),
        "zero_slope": zero_slope,
        "growth_slope": inf_slope,
    }

    if all(v > 0 for v in zero_env) and _nonincreasing(zero_env):
        if max(zero_env) <= zero_floor or (zero_slope is not None and zero_slope <= -slope_floor):
            return LimitTrace(**trace, limit=ExtendedReal.zero(), converged=True, diagnostics=diagnostics)

    if all(v > 0 for v in inf_env) and _nondecreasing(inf_env) and inf_env[-1] > inf_env[0]:
        grows = inf_slope is not None and inf_slope >= slope_floor and inf_env[-1] > 1
        if inf_env[-1] > large or grows:
            return LimitTrace(**trace, limit=ExtendedReal.infinite(), converged=True, diagnostics=diagnostics)

    scale = max(1.0, abs(to_float(tail_stat)))
    settled = abs(to_float(tail_stat - half_stat)) <= rel_tol * scale
    if stat is None:
        settled = settled and max(abs(to_float(v - tail[-1])) for v in tail) <= rel_tol * scale
    value = to_float(tail_stat)

    extrapolated = None
    if not settled and consecutive and stat is None:
        first = int(indices[0])
        wide = richardson_limit(values, first, order=12)
        narrow = richardson_limit(values, first, order=10)
        if wide is not None and narrow is not None and math.isfinite(wide):
            diagnostics["richardson"] = [wide, narrow]
            if abs(wide - narrow) <= rel_tol * max(1.0, abs(wide)):
                settled, value, extrapolated = True, wide, wide

    if not math.isfinite(value):
        return LimitTrace(**trace, limit=ExtendedReal.unknown(), diagnostics=diagnostics)
    return LimitTrace(
        **trace,
        limit=ExtendedReal.finite(value),
        converged=settled,
        extrapolated=extrapolated,
        diagnostics=diagnostics,
    )
