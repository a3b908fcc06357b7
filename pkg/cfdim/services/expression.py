"""
Мини-язык выражений для генераторов последовательностей и функций.

Грамматика: числа, переменные k, n, n_k, константа e, именованные
пользовательские константы (B, C, c, ...), операции + - * / ^ и функции
exp, log, sqrt, floor, ceil. Разбор выполняет sympy, вычисление идёт в
лог-шкале: каждое значение хранится как (знак, log|x|) в mpmath, поэтому
величины вроде exp(e^(k^2)) или b^(c^n) не материализуются.
"""

import math
from tokenize import TokenError
from typing import Any, Callable, Dict, Mapping, Optional, Tuple, Union

import mpmath
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from cfdim.utils.error_handling import DomainError
from cfdim.utils.validation import ValidationError


VARIABLES = ("k", "n", "n_k")
WORKING_DPS = 50
# floor/ceil вычисляются точно, пока |x| < e^FLOOR_EXACT_LOG
FLOOR_EXACT_LOG = 90

LogValue = Tuple[int, Any]

_FUNCTIONS = {
    "e": sympy.E,
    "exp": sympy.exp,
    "log": sympy.log,
    "sqrt": sympy.sqrt,
    "floor": sympy.floor,
    "ceil": sympy.ceiling,
    "ceiling": sympy.ceiling,
}


def from_number(value: Any) -> LogValue:
    """Число → (знак, log|x|)."""
    x = mpmath.mpf(value)
    if x == 0:
        return 0, mpmath.ninf
    return (1 if x > 0 else -1), mpmath.log(abs(x))


def to_number(log_value: LogValue) -> Any:
    """(знак, log|x|) → mpf."""
    sign, magnitude = log_value
    if sign == 0:
        return mpmath.mpf(0)
    return sign * mpmath.exp(magnitude)


def exact_floor(x: Any) -> Any:
    """floor для mpf с поправкой на ошибку округления вблизи целого."""
    nearest = mpmath.nint(x)
    if abs(x - nearest) <= mpmath.mpf(10) ** (8 - WORKING_DPS) * max(1, abs(x)):
        return nearest
    return mpmath.floor(x)


def _log_add(terms) -> LogValue:
    live = [(s, m) for s, m in terms if s != 0]
    if not live:
        return 0, mpmath.ninf
    top = max(m for _, m in live)
    total = mpmath.fsum(s * mpmath.exp(m - top) for s, m in live)
    if total == 0:
        return 0, mpmath.ninf
    return (1 if total > 0 else -1), top + mpmath.log(abs(total))


class Expression:
    """
    Разобранное выражение генератора.

    Args:
        text: текст выражения, например "2^(k^2)" или "exp(e^(k^2))"
        constants: значения именованных констант
    """

    def __init__(self, text: str, constants: Optional[Mapping[str, float]] = None):
        self.text = str(text)
        self.constants: Dict[str, float] = dict(constants or {})
        local = dict(_FUNCTIONS)
        local.update({name: sympy.Symbol(name) for name in VARIABLES})
        local.update({name: sympy.Symbol(name) for name in self.constants})
        try:
            self.tree = parse_expr(
                self.text,
                local_dict=local,
                transformations=standard_transformations + (convert_xor,),
            )
        except (SyntaxError, TypeError, ValueError, TokenError, sympy.SympifyError) as e:
            raise ValidationError(f"Не удалось разобрать выражение '{self.text}': {e}")

        if not isinstance(self.tree, sympy.Basic):
            self.tree = sympy.sympify(self.tree)
        names = {symbol.name for symbol in self.tree.free_symbols}
        unknown = names - set(VARIABLES) - set(self.constants)
        if unknown:
            raise ValidationError(
                f"Неизвестные имена в выражении '{self.text}': {', '.join(sorted(unknown))}"
            )
        self.variables = names & set(VARIABLES)

    def __repr__(self) -> str:
        return f"Expression({self.text!r})"

    def log_eval(self, **variables: Any) -> LogValue:
        """Значение в лог-шкале: (знак, log|x|)."""
        with mpmath.workdps(WORKING_DPS):
            env = {name: mpmath.mpf(value) for name, value in self.constants.items()}
            env.update({name: mpmath.mpf(value) for name, value in variables.items()})
            missing = self.variables - set(env)
            if missing:
                raise DomainError(f"Не заданы переменные {sorted(missing)} для '{self.text}'")
            return self._eval(self.tree, env)

    def value(self, **variables: Any) -> Any:
        """Значение как mpf (может быть огромным)."""
        with mpmath.workdps(WORKING_DPS):
            return to_number(self.log_eval(**variables))

    def _eval(self, node, env) -> LogValue:
        if node.is_Symbol:
            return from_number(env[node.name])
        if node is sympy.E:
            return 1, mpmath.mpf(1)
        if node.is_Rational:
            return from_number(mpmath.mpf(int(node.p)) / int(node.q))
        if node.is_Number:
            return from_number(mpmath.mpf(str(node)))
        if node.is_NumberSymbol:
            return from_number(mpmath.mpf(str(node.evalf(WORKING_DPS + 10))))

        if isinstance(node, sympy.Add):
            return _log_add([self._eval(arg, env) for arg in node.args])

        if isinstance(node, sympy.Mul):
            sign, magnitude = 1, mpmath.mpf(0)
            for arg in node.args:
                s, m = self._eval(arg, env)
                if s == 0:
                    return 0, mpmath.ninf
                sign *= s
                magnitude += m
            return sign, magnitude

        if isinstance(node, sympy.Pow):
            base_sign, base_log = self._eval(node.args[0], env)
            exponent = to_number(self._eval(node.args[1], env))
            if base_sign == 0:
                if exponent > 0:
                    return 0, mpmath.ninf
                raise DomainError(f"0 в неположительной степени в '{self.text}'")
            if base_sign < 0:
                if exponent != mpmath.floor(exponent):
                    raise DomainError(f"Дробная степень отрицательного числа в '{self.text}'")
                base_sign = -1 if int(exponent) % 2 else 1
            return base_sign, exponent * base_log

        if isinstance(node, sympy.exp):
            return 1, to_number(self._eval(node.args[0], env))

        if isinstance(node, sympy.log):
            sign, magnitude = self._eval(node.args[0], env)
            if sign <= 0:
                raise DomainError(f"Логарифм неположительного числа в '{self.text}'")
            return from_number(magnitude)

        if isinstance(node, (sympy.floor, sympy.ceiling)):
            sign, magnitude = self._eval(node.args[0], env)
            if sign != 0 and magnitude > FLOOR_EXACT_LOG:
                return sign, magnitude
            x = to_number((sign, magnitude))
            if isinstance(node, sympy.floor):
                rounded = exact_floor(x)
            else:
                rounded = -exact_floor(-x)
            return from_number(rounded)

        if isinstance(node, sympy.Abs):
            sign, magnitude = self._eval(node.args[0], env)
            return abs(sign), magnitude

        raise DomainError(f"Операция {node.func.__name__} не поддерживается в '{self.text}'")


class CallableGenerator:
    """
    Обёртка над функцией Python как генератором.

    Args:
        func: функция одного аргумента (k или n)
        variable: имя аргумента
        log_scale: функция возвращает log f вместо f
    """

    def __init__(self, func: Callable[[Any], Any], variable: str = "n", log_scale: bool = False):
        self.func = func
        self.variable = variable
        self.log_scale = log_scale
        self.text = getattr(func, "__name__", "callable")

    def __repr__(self) -> str:
        return f"CallableGenerator({self.text})"

    def log_eval(self, **variables: Any) -> LogValue:
        argument = variables[self.variable]
        if isinstance(argument, mpmath.mpf) and argument == mpmath.floor(argument) and abs(argument) < 2**62:
            argument = int(argument)
        with mpmath.workdps(WORKING_DPS):
            result = self.func(argument)
            if self.log_scale:
                return 1, mpmath.mpf(result)
            return from_number(result)

    def value(self, **variables: Any) -> Any:
        with mpmath.workdps(WORKING_DPS):
            return to_number(self.log_eval(**variables))


def as_generator(
    source: Union[str, float, int, Callable, Expression, CallableGenerator],
    variable: str = "n",
    constants: Optional[Mapping[str, float]] = None,
):
    """Привести строку, число или функцию к генератору с методом log_eval."""
    if isinstance(source, (Expression, CallableGenerator)):
        return source
    if isinstance(source, str):
        return Expression(source, constants)
    if isinstance(source, (int, float)) and not isinstance(source, bool):
        if not math.isfinite(source):
            raise ValidationError(f"Константный генератор должен быть конечным: {source}")
        return Expression(repr(source), constants)
    if callable(source):
        return CallableGenerator(source, variable)
    raise ValidationError(f"Не удалось построить генератор из {source!r}")


def log_positive(generator, **variables: Any) -> Any:
    """log x для положительного значения генератора."""
    sign, magnitude = generator.log_eval(**variables)
    if sign <= 0:
        raise DomainError(f"Генератор {generator!r} неположителен при {variables}")
    return magnitude
