"""
Иерархия ошибок cfdim и их отображение в коды выхода CLI.
"""

import traceback
from functools import wraps
from typing import Any, Callable, Dict, Optional

from loguru import logger
from rich.console import Console

from cfdim.utils.validation import ValidationError


EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64


class CfdimError(Exception):
    """Базовый класс для ошибок cfdim."""

    exit_code = EXIT_DOMAIN

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class DomainError(CfdimError):
    """Параметры вне области определения (θ ≤ 1/2, x вне (0,1) и т.д.)."""
    pass


class BudgetError(CfdimError):
    """Исчерпан вычислительный бюджет (перебор, узлы дерева, глубина)."""

    exit_code = EXIT_BUDGET


class HypothesisError(DomainError):
    """Нарушены гипотезы (H1)-(H3) для тройки последовательностей."""

    def __init__(self, message: str, failed: Optional[list] = None):
        super().__init__(message, {"failed": failed or []})
        self.failed = failed or []


class IndeterminateProfileError(DomainError):
    """Диагностики профиля не сошлись и аналитическая подстановка не задана."""
    pass


class LimitFlagError(DomainError):
    """Верхний предел в определении C_ψ не является пределом."""
    pass


class DegenerateError(DomainError):
    """Вырожденная конструкция (нет целых точек в интервале, s_k ≤ 1 и т.п.)."""
    pass


class UsageError(CfdimError):
    """Ошибка использования (некорректные аргументы)."""

    exit_code = EXIT_USAGE


def exit_code_for(error: Exception) -> int:
    """Код выхода для исключения."""
    if isinstance(error, CfdimError):
        return error.exit_code
    if isinstance(error, ValidationError):
        return EXIT_USAGE
    return 1


def as_usage_errors(func: Callable) -> Callable:
    """Декоратор: ошибки валидации превращаются в UsageError."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            logger.warning(f"Validation error in {func.__name__}: {e}")
            raise UsageError(str(e))
    return wrapper


def handle_cli_errors(func: Callable) -> Callable:
    """
    Декоратор для команд CLI: логирует ошибку и завершает процесс с кодом.

    Raises:
        SystemExit: с кодом из exit_code_for
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (CfdimError, ValidationError) as e:
            code = exit_code_for(e)
            if code == EXIT_BUDGET:
                logger.error(f"Budget exhausted in {func.__name__}: {e}")
            else:
                logger.error(f"{type(e).__name__} in {func.__name__}: {e}")
            Console(stderr=True).print(format_error_for_user(e))
            raise SystemExit(code)
        except SystemExit:
            raise
        except Exception as e:
            logger.error(f"Unexpected error in {func.__name__}: {e}")
            logger.error(f"Traceback: {traceback.format_exc()}")
            raise SystemExit(1)
    return wrapper


def format_error_for_user(error: Exception) -> str:
    """
    Форматирование ошибки для показа в терминале.

    Args:
        error: Исключение

    Returns:
        Отформатированное сообщение об ошибке
    """
    if isinstance(error, (UsageError, ValidationError)):
        return f"[red]usage error:[/red] {error}"
    elif isinstance(error, BudgetError):
        return f"[yellow]budget exhausted:[/yellow] {error}"
    elif isinstance(error, HypothesisError):
        failed = ", ".join(error.failed) or "?"
        return f"[red]hypotheses failed ({failed}):[/red] {error}"
    elif isinstance(error, CfdimError):
        return f"[red]domain error:[/red] {error}"
    else:
        return f"[red]unexpected error:[/red] {error}"
