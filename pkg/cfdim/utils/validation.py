"""
Утилиты для валидации входных параметров вычислений.
"""

import math
from typing import Iterable, List, Sequence

from loguru import logger


class ValidationError(Exception):
    """Ошибка валидации."""
    pass


class InputValidator:
    """Валидатор параметров запросов."""

    @classmethod
    def validate_theta(cls, theta: float, lower: float = 0.0) -> bool:
        """Валидация параметра θ (строго больше нижней границы)."""
        return isinstance(theta, (int, float)) and math.isfinite(theta) and theta > lower

    @classmethod
    def validate_positive_int(cls, value: int) -> bool:
        """Валидация натурального числа."""
        return isinstance(value, int) and not isinstance(value, bool) and value >= 1

    @classmethod
    def validate_tolerance(cls, tol: float) -> bool:
        """Валидация допуска (бесконечность разрешена)."""
        return isinstance(tol, (int, float)) and tol > 0 and not math.isnan(tol)

    @classmethod
    def validate_digits(cls, digits: Iterable[int]) -> bool:
        """Валидация цифр цепной дроби."""
        return all(isinstance(a, int) and a >= 1 for a in digits)

    @classmethod
    def validate_scales(cls, scales: Sequence[float]) -> bool:
        """Валидация сетки масштабов: положительные, строго убывающие."""
        if len(scales) < 2:
            return False
        if any(s <= 0 for s in scales):
            return False
        return all(a > b for a, b in zip(scales, scales[1:]))


def validate_theta(theta: float, lower: float = 0.0, name: str = "theta") -> float:
    """
    Валидация θ.

    Raises:
        ValidationError: если θ не конечно или не превосходит нижнюю границу
    """
    if not InputValidator.validate_theta(theta, lower):
        raise ValidationError(f"Параметр {name}={theta} должен быть больше {lower}")
    return float(theta)


def validate_positive_int(value: int, name: str) -> int:
    """Валидация натурального параметра."""
    if not InputValidator.validate_positive_int(value):
        raise ValidationError(f"Параметр {name}={value!r} должен быть натуральным числом")
    return value


def validate_tolerance(tol: float) -> float:
    """Валидация допуска."""
    if not InputValidator.validate_tolerance(tol):
        raise ValidationError(f"Допуск {tol} должен быть положительным")
    return float(tol)


def validate_digits(digits: Sequence[int]) -> List[int]:
    """Валидация непустого набора цифр."""
    if not digits or not InputValidator.validate_digits(digits):
        raise ValidationError(f"Цифры {list(digits)} должны быть натуральными, набор непустым")
    return list(digits)


def validate_scales(scales: Sequence[float]) -> List[float]:
    """Валидация сетки масштабов подсчёта ящиков."""
    if not InputValidator.validate_scales(scales):
        logger.warning(f"Invalid scales: {scales}")
        raise ValidationError(f"Масштабы {list(scales)} должны быть положительными и строго убывать, не меньше двух")
    return [float(s) for s in scales]
