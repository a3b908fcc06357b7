"""
Дискретизация взвешенного оператора переноса на равномерной сетке [0,1].

g_{k+1}(x) = Σ_a (a+x)^{-2θ} g_k(1/(a+x)),  g_0 ≡ 1,  g_n(0) = Σ q_n^{-2θ}.

Значения g между узлами восстанавливаются сплайном; для неограниченного
алфавита цифры после explicit_digits учитываются рядом Тейлора в нуле с
коэффициентами через дзета-функцию Гурвица.
"""

import math
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger
from scipy.interpolate import make_interp_spline
from scipy.special import zeta

from cfdim.utils.error_handling import DomainError


DEFAULT_GRID_SIZE = 512
DEFAULT_EXPLICIT_DIGITS = 64


class TransferOperator:
    """Матрица оператора переноса для фиксированных (θ, M)."""

    def __init__(
        self,
        theta: float,
        digit_cap: Optional[int],
        grid_size: int = DEFAULT_GRID_SIZE,
        interpolation_order: int = 3,
        explicit_digits: int = DEFAULT_EXPLICIT_DIGITS,
    ):
        if interpolation_order not in (1, 3):
            raise DomainError(f"Порядок интерполяции {interpolation_order} не поддерживается (1 или 3)")
        if digit_cap is None and theta <= 0.5:
            raise DomainError(f"theta={theta} ≤ 1/2: ряд по всем цифрам расходится")
        self.theta = float(theta)
        self.digit_cap = digit_cap
        self.grid_size = grid_size
        self.order = interpolation_order
        self.explicit_digits = explicit_digits if digit_cap is None else digit_cap
        self.grid = np.linspace(0.0, 1.0, grid_size)
        self._basis = make_interp_spline(self.grid, np.eye(grid_size), k=interpolation_order)
        self.matrix = self._build_matrix()
        # 2^j -> (нормированная матрица, log масштаба)
        self._powers: Dict[int, Tuple[np.ndarray, float]] = {1: self._normalize(self.matrix, 0.0)}

    def _build_matrix(self) -> np.ndarray:
        s = 2.0 * self.theta
        x = self.grid
        matrix = np.zeros((self.grid_size, self.grid_size))
        for a in range(1, self.explicit_digits + 1):
            y = 1.0 / (a + x)
            matrix += (y ** s)[:, None] * self._basis(y)
        if self.digit_cap is None:
            # Σ_{a>A} (a+x)^{-s} g(1/(a+x)) ≈ Σ_k g^{(k)}(0)/k! · ζ(s+k, A+1+x)
            start = self.explicit_digits + 1 + x
            for k in range(self.order + 1):
                weights = zeta(s + k, start) / math.factorial(k)
                derivative_row = self._basis(np.array([0.0]), nu=k)[0]
                matrix += np.outer(weights, derivative_row)
        return matrix

    @staticmethod
    def _normalize(matrix: np.ndarray, log_scale: float) -> Tuple[np.ndarray, float]:
        peak = float(np.max(np.abs(matrix)))
        if peak == 0.0 or not math.isfinite(peak):
            raise DomainError("Вырожденная матрица оператора переноса")
        return matrix / peak, log_scale + math.log(peak)

    def _dyadic_power(self, exponent: int) -> Tuple[np.ndarray, float]:
        """T^{2^j} в нормированном виде; степени кэшируются."""
        current = 1
        while current < exponent:
            if 2 * current not in self._powers:
                base, scale = self._powers[current]
                self._powers[2 * current] = self._normalize(base @ base, 2.0 * scale)
            current *= 2
        return self._powers[exponent]

    def log_sum(self, n: int) -> float:
        """log S_n = log (T^n 1)(0) для произвольного n ≥ 1."""
        if n < 1:
            raise DomainError(f"Глубина n={n} должна быть натуральной")
        vector = np.ones(self.grid_size)
        log_scale = 0.0
        bit = 1
        while bit <= n:
            if n & bit:
                power, scale = self._dyadic_power(bit)
                vector = power @ vector
                peak = float(np.max(np.abs(vector)))
                vector /= peak
                log_scale += scale + math.log(peak)
            bit *= 2
        head = float(vector[0])
        if head <= 0.0:
            raise DomainError(f"Неположительная сумма на глубине {n}: сетка слишком груба")
        return log_scale + math.log(head)

    def leading_log_eigenvalue(self, max_iter: int = 500, tol: float = 1e-13) -> float:
        """log ведущего собственного числа (оценка P_M(θ) или P(θ))."""
        vector = np.ones(self.grid_size)
        estimate = 0.0
        for iteration in range(max_iter):
            image = self.matrix @ vector
            norm = float(np.max(np.abs(image)))
            new_estimate = math.log(norm)
            vector = image / norm
            if iteration > 2 and abs(new_estimate - estimate) < tol:
                return new_estimate
            estimate = new_estimate
        logger.warning(
            f"Power iteration did not settle for theta={self.theta}, cap={self.digit_cap}"
        )
        return estimate
