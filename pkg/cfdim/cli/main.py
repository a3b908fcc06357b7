"""
Командная строка cfdim.

Подкоманды:
- pressure: скобка P(θ) или P_M(θ), уточнение до ширины tol
- solve: произвольное уравнение P(θ) = rhs(θ)
- dim: размерности по семействам (e, el, fn, limsup, liminf-max, sum, liao-rams, ...)
- profile: диагностика последовательностей и функций
- verify: переборные оракулы и эмпирические оценки

Коды выхода: 0 успех, 2 доменная ошибка, 3 исчерпан бюджет, 64 ошибка использования.
"""

import math
import sys
import time
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np
from loguru import logger

from cfdim import __version__
from cfdim.cli.output import render, write_plot
from cfdim.models.config import OutputFormat, RunConfig
from cfdim.models.dimension import DimensionResult, PressureEquation
from cfdim.models.empirical import CoverScheme, ConstructionParams, LemmaMode
from cfdim.models.pressure import PressureBracket, PressureMethod, PressureQuery
from cfdim.models.profile import SequenceTriple, SumDescriptor, SumFamily
from cfdim.models.report import Provenance, Report
from cfdim.services.dimension_service import DimensionService
from cfdim.services.empirical_service import EmpiricalService
from cfdim.services.expression import Expression
from cfdim.services.pressure_service import PressureService
from cfdim.services.profile_service import ProfileService
from cfdim.utils.config import ConfigError, build_run_config
from cfdim.utils.error_handling import (
    EXIT_OK,
    EXIT_USAGE,
    DomainError,
    UsageError,
    as_usage_errors,
    handle_cli_errors,
)
from cfdim.utils.logger import LoggingConfig, log_run_shutdown, log_run_startup
from cfdim.utils.validation import (
    ValidationError,
    validate_digits,
    validate_positive_int,
    validate_scales,
    validate_theta,
    validate_tolerance,
)


PLOT_POINTS = 60


@dataclass
class CliContext:
    """Конфигурация запуска и лениво создаваемые сервисы."""

    config: RunConfig
    started: float = field(default_factory=time.perf_counter)

    @cached_property
    def pressure(self) -> PressureService:
        return PressureService(
            enumeration_cap=self.config.enumeration_cap,
            grid_size=self.config.grid_size,
            interpolation_order=self.config.interpolation_order,
            explicit_digits=self.config.explicit_digits,
            singularity_margin=self.config.singularity_margin,
            threads=self.config.threads,
        )

    @cached_property
    def profiles(self) -> ProfileService:
        return ProfileService(k_max=self.config.k_max, n_max=self.config.n_max)

    @cached_property
    def dimensions(self) -> DimensionService:
        return DimensionService(
            self.pressure,
            self.profiles,
            tolerance=self.config.tolerance,
            max_depth=self.config.max_depth,
            margin=self.config.singularity_margin,
        )

    @cached_property
    def empirical(self) -> EmpiricalService:
        return EmpiricalService(
            self.pressure,
            node_cap=self.config.node_cap,
            threads=self.config.threads,
            seed=self.config.seed,
        )

    def provenance(self, M: Optional[int] = None, n: Optional[int] = None, tol: Optional[float] = None) -> Provenance:
        runtime = None
        if self.config.record_runtime:
            runtime = round(time.perf_counter() - self.started, 6)
        return Provenance(M=M, n=n, tol=tol, runtime=runtime)

    def emit(self, report: Report) -> int:
        click.echo(render(report, self.config.output_format))
        return EXIT_OK


# Общие опции

def tol_option(func):
    return click.option("--tol", type=float, default=None, help="Допуск по θ (по умолчанию из конфигурации)")(func)


def emit_plot_option(func):
    return click.option(
        "--emit-plot",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Записать данные графика (CSV x,y)",
    )(func)


def const_options(func):
    """Именованные константы выражений: --B, --C, --b, --c и --const NAME=VALUE."""
    func = click.option("--const", "consts", multiple=True, help="Константа NAME=VALUE")(func)
    for name in ("B", "C", "b", "c"):
        func = click.option(f"--{name}", f"const_{name}", type=float, default=None, help=f"Константа {name}")(func)
    return func


def triple_options(func):
    func = click.option("--skip-hypotheses", is_flag=True, help="Не проверять условия (H1)-(H3)")(func)
    func = click.option("--k-max", type=int, default=None, help="Горизонт по k")(func)
    for name in ("alpha", "beta", "xi", "gamma"):
        func = click.option(f"--{name}", type=float, default=None, help=f"Аналитическое значение {name}")(func)
    func = click.option("--t", "t_expr", required=True, help="Выражение t_k")(func)
    func = click.option("--s", "s_expr", required=True, help="Выражение s_k")(func)
    func = click.option("--n", "n_expr", required=True, help="Выражение n_k")(func)
    return const_options(func)


def collect_constants(consts: Sequence[str], **named: Optional[float]) -> Dict[str, float]:
    """Собрать константы из --B/--C/--b/--c и --const NAME=VALUE."""
    values = {key.replace("const_", ""): value for key, value in named.items() if value is not None}
    for item in consts:
        name, sep, raw = item.partition("=")
        if not sep or not name.strip():
            raise ValidationError(f"Константа должна иметь вид NAME=VALUE: {item!r}")
        try:
            values[name.strip()] = float(raw)
        except ValueError:
            raise ValidationError(f"Значение константы {name} не число: {raw!r}")
    return values


def build_triple(n_expr: str, s_expr: str, t_expr: str, constants: Dict[str, float], overrides: Dict[str, Optional[float]]) -> SequenceTriple:
    return SequenceTriple(
        n_gen=Expression(n_expr, constants),
        s_gen=Expression(s_expr, constants),
        t_gen=Expression(t_expr, constants),
        overrides={key: value for key, value in overrides.items() if value is not None},
        name=f"n={n_expr}, s={s_expr}, t={t_expr}",
    )


def model_or_usage(factory, *args, **kwargs):
    """Построить модель; ошибки проверки pydantic становятся ошибкой использования."""
    try:
        return factory(*args, **kwargs)
    except ValueError as e:
        raise UsageError(str(e))


def dimension_report(obj: CliContext, query: Dict[str, Any], result: DimensionResult) -> Report:
    diagnostics: Dict[str, Any] = {"kind": result.kind.value, "case": result.branch.label, **result.diagnostics}
    if result.notes:
        diagnostics["notes"] = result.notes
    return Report(
        query=query,
        branch=result.branch.value,
        value_lo=result.value_lo,
        value_hi=result.value_hi,
        diagnostics=diagnostics,
        provenance=obj.provenance(M=result.digit_cap, n=result.depth, tol=result.tolerance),
    )


def bracket_report(obj: CliContext, query: Dict[str, Any], bracket: PressureBracket, tol: Optional[float] = None) -> Report:
    return Report(
        query=query,
        branch=f"pressure_{bracket.kind.value}",
        value_lo=bracket.lower,
        value_hi=bracket.upper,
        diagnostics={
            "width": bracket.width,
            "method": bracket.method.value,
            "tail": bracket.tail,
            "converged": bracket.converged,
            "certified": bracket.certified,
        },
        provenance=obj.provenance(M=bracket.digit_cap, n=bracket.depth, tol=tol),
    )


# Группа

@click.group()
@click.version_option(__version__, prog_name="cfdim")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Путь к config.yaml")
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default=None)
@click.option("--threads", type=int, default=None, help="Число рабочих потоков")
@click.option("--seed", type=int, default=None, help="Зерно генератора")
@click.option("--log-level", type=str, default=None, help="Уровень логирования")
@click.option("--grid-size", type=int, default=None, help="Размер сетки оператора переноса")
@click.option("--no-runtime", is_flag=True, default=False, help="Не записывать время счёта (побитово воспроизводимый отчёт)")
@click.pass_context
@handle_cli_errors
def cli(ctx, config_path, output_format, threads, seed, log_level, grid_size, no_runtime):
    """cfdim: размерность Хаусдорфа множеств цепных дробей с большими неполными частными."""
    overrides = {
        "output_format": output_format,
        "threads": threads,
        "seed": seed,
        "log_level": log_level,
        "grid_size": grid_size,
        "record_runtime": False if no_runtime else None,
    }
    try:
        config = build_run_config(overrides, config_path)
    except ConfigError as e:
        raise UsageError(e.message)
    LoggingConfig(write_files=config.log_files).setup_logging(config.log_level)
    log_run_startup(ctx.invoked_subcommand or "")
    ctx.obj = CliContext(config=config)


# pressure

@cli.command()
@click.option("--theta", type=float, required=True, help="Параметр θ")
@click.option("--cap", "digit_cap", type=int, default=None, help="M: ограничение цифр (по умолчанию без ограничения)")
@click.option("--depth", type=int, default=14, show_default=True, help="Глубина n")
@click.option("--method", type=click.Choice([m.value for m in PressureMethod]), default=None)
@click.option("--restricted", is_flag=True, help="Скобка P_M(θ) вместо P(θ)")
@click.option("--refine", "refine_tol", type=float, default=None, help="Уточнять скобку P(θ) до ширины tol")
@emit_plot_option
@click.pass_obj
@handle_cli_errors
def pressure(obj: CliContext, theta, digit_cap, depth, method, restricted, refine_tol, emit_plot):
    """Сертифицированная скобка давления."""
    theta = validate_theta(theta)
    depth = validate_positive_int(depth, "depth")
    if digit_cap is not None:
        validate_positive_int(digit_cap, "cap")
    if restricted and digit_cap is None:
        raise ValidationError("--restricted требует --cap")
    if method is None:
        small = digit_cap is not None and digit_cap**depth <= obj.config.enumeration_cap
        method = PressureMethod.ENUMERATE if small else PressureMethod.OPERATOR_ITERATION
    # P(θ) считается по всему алфавиту, --cap для него только точка усечения
    try:
        request = PressureQuery(
            theta=theta,
            digit_cap=digit_cap if restricted else None,
            depth=depth,
            method=method,
            grid_size=obj.config.grid_size,
            interpolation_order=obj.config.interpolation_order,
            margin=obj.config.singularity_margin,
        )
    except ValueError as e:
        raise DomainError(str(e))
    service = obj.pressure
    query = {"command": "pressure", "theta": request.theta, "M": digit_cap, "n": request.depth, "restricted": restricted}

    if refine_tol is not None:
        bracket = service.pressure_refine(request.theta, validate_tolerance(refine_tol))
        query["refine"] = refine_tol
    else:
        query["method"] = request.method.value
        if restricted:
            bracket = service.pressure_restricted(request.theta, digit_cap, request.depth, request.method)
        else:
            bracket = service.pressure_full(request.theta, digit_cap, request.depth, request.method)

    if emit_plot:
        low = 0.05 if restricted and digit_cap else 0.5 + 2 * obj.config.singularity_margin
        thetas = np.linspace(low, 1.5, PLOT_POINTS)
        cap = digit_cap if restricted else None
        write_plot(emit_plot, *zip(*service.pressure_curve(thetas, cap)))
    return obj.emit(bracket_report(obj, query, bracket, refine_tol))


# solve

@cli.command()
@click.option("--slope", type=float, default=None, help="rhs(θ) = slope·θ + intercept")
@click.option("--intercept", type=float, default=0.0, show_default=True)
@click.option("--log-b", type=float, default=None, help="Тип I: rhs = θ·log B")
@click.option("--alpha", type=float, default=None, help="rhs = α(2θ-1) + β(1-θ)")
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--hat", "log_c", type=float, default=None, help="rhs = (√θ+√(2θ-1))²·log C")
@click.option("--fast", is_flag=True, help="Несертифицированный корень по сплайну")
@tol_option
@emit_plot_option
@click.pass_obj
@handle_cli_errors
def solve(obj: CliContext, slope, intercept, log_b, alpha, beta, log_c, fast, tol, emit_plot):
    """Решить уравнение P(θ) = rhs(θ) на (1/2, 1]."""
    chosen = [value is not None for value in (slope, log_b, alpha, log_c)]
    if sum(chosen) != 1:
        raise ValidationError("Укажите ровно одну правую часть: --slope, --log-b, --alpha или --hat")
    if log_c is not None:
        eq = model_or_usage(PressureEquation.hat, log_c)
    elif alpha is not None:
        eq = model_or_usage(PressureEquation.alpha_beta, alpha, beta)
    elif log_b is not None:
        eq = model_or_usage(PressureEquation.type_one, log_b)
    else:
        eq = model_or_usage(PressureEquation.affine, slope, intercept)
    query = {"command": "solve", "equation": eq.describe(), "fast": fast}

    if fast:
        root = obj.dimensions.fast_root(eq)
        report = Report(
            query=query,
            branch="fast_root",
            value_lo=root,
            value_hi=root,
            diagnostics={"kind": "estimate"},
            provenance=obj.provenance(),
        )
    else:
        tol = validate_tolerance(tol) if tol is not None else None
        report = dimension_report(obj, query, obj.dimensions.solve_pressure_equation(eq, tol))

    if emit_plot:
        thetas = np.linspace(0.5 + 2 * obj.config.singularity_margin, 1.0, PLOT_POINTS)
        points = obj.pressure.pressure_curve(thetas)
        write_plot(emit_plot, [t for t, _ in points], [p - eq.rhs(t) for t, p in points])
    return obj.emit(report)


# dim

@cli.group()
def dim():
    """Размерности по семействам множеств."""


def _growth_result(obj: CliContext, kind: str, n_expr, s_expr, t_expr, k_max, skip_hypotheses, tol, consts, overrides, named):
    constants = collect_constants(consts, **named)
    triple = build_triple(n_expr, s_expr, t_expr, constants, overrides)
    profile = obj.profiles.growth_profile(triple, k_max, triple.overrides)
    if not skip_hypotheses:
        profile = profile.model_copy(update={"hypotheses": obj.profiles.check_hypotheses(triple, k_max)})
    tol = validate_tolerance(tol) if tol is not None else None
    solver = obj.dimensions.dim_E if kind == "e" else obj.dimensions.dim_EL
    result = solver(profile, tol)
    query = {"command": f"dim {kind}", "n": n_expr, "s": s_expr, "t": t_expr, **constants, **triple.overrides}
    if profile.hypotheses is not None:
        result = result.model_copy(
            update={
                "diagnostics": {
                    **result.diagnostics,
                    "hypotheses": {name: getattr(profile.hypotheses, name).value for name in ("h1", "h2", "h3")},
                }
            }
        )
    return obj.emit(dimension_report(obj, query, result))


@dim.command("e")
@triple_options
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_e(obj: CliContext, n_expr, s_expr, t_expr, alpha, beta, xi, gamma, k_max, skip_hypotheses, tol, consts, **named):
    """dim E({n_k},{s_k},{t_k}): цифры a_{n_k} ∈ (s_k, s_k+t_k]."""
    overrides = {"alpha": alpha, "beta": beta, "xi": xi, "gamma": gamma}
    return _growth_result(obj, "e", n_expr, s_expr, t_expr, k_max, skip_hypotheses, tol, consts, overrides, named)


@dim.command("el")
@triple_options
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_el(obj: CliContext, n_expr, s_expr, t_expr, alpha, beta, xi, gamma, k_max, skip_hypotheses, tol, consts, **named):
    """dim E_L: цифры a_{n_k} ≥ s_k на бесконечно многих k."""
    overrides = {"alpha": alpha, "beta": beta, "xi": xi, "gamma": gamma}
    return _growth_result(obj, "el", n_expr, s_expr, t_expr, k_max, skip_hypotheses, tol, consts, overrides, named)


@dim.command("fn")
@click.option("--N", "N", type=int, required=True, help="Ограничение цифр N")
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_fn(obj: CliContext, N, tol):
    """dim F_N: цифры не больше N."""
    validate_positive_int(N, "N")
    tol = validate_tolerance(tol) if tol is not None else None
    result = obj.dimensions.dim_F_N(N, tol)
    return obj.emit(dimension_report(obj, {"command": "dim fn", "N": N}, result))


def _function_expression(text: str, consts, named) -> Tuple[Expression, Dict[str, float]]:
    constants = collect_constants(consts, **named)
    if "B" in constants and constants["B"] <= 1:
        raise ValidationError(f"Константа B={constants['B']} должна быть больше 1")
    return Expression(text, constants), constants


@dim.command("limsup")
@click.option("--psi", required=True, help="Выражение ψ(n)")
@click.option("--family", type=click.Choice(["A", "M"]), default="A", show_default=True)
@click.option("--n-max", type=int, default=None, help="Горизонт по n")
@const_options
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_limsup(obj: CliContext, psi, family, n_max, consts, tol, **named):
    """dim A(ψ) (a_n ≥ ψ(n) бесконечно часто) или M(ψ)."""
    expression, constants = _function_expression(psi, consts, named)
    profile = obj.profiles.function_profile(expression, n_max)
    tol = validate_tolerance(tol) if tol is not None else None
    result = obj.dimensions.dim_limsup_family(profile, family, tol)
    query = {"command": "dim limsup", "psi": psi, "family": family, **constants}
    return obj.emit(dimension_report(obj, query, result))


@dim.command("liminf-max")
@click.option("--psi", required=True, help="Выражение ψ(n)")
@click.option("--n-max", type=int, default=None)
@const_options
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_liminf_max(obj: CliContext, psi, n_max, consts, tol, **named):
    """Множество с условием на максимум первых n цифр по liminf."""
    expression, constants = _function_expression(psi, consts, named)
    profile = obj.profiles.function_profile(expression, n_max)
    tol = validate_tolerance(tol) if tol is not None else None
    result = obj.dimensions.dim_liminf_max(profile, tol)
    return obj.emit(dimension_report(obj, {"command": "dim liminf-max", "psi": psi, **constants}, result))


@dim.command("sum")
@click.option("--phi", default=None, help="Выражение φ(n)")
@click.option("--family", type=click.Choice([f.value for f in SumFamily]), default=None, help="Именованное семейство φ")
@click.option("--r", "r_value", type=float, default=None)
@click.option("--d", "d_value", type=float, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--remainder", default=None, help="Выражение остатка r1(n) или r2(n)")
@click.option("--n-max", type=int, default=None)
@const_options
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_sum(obj: CliContext, phi, family, r_value, d_value, gamma, remainder, n_max, consts, tol, **named):
    """dim S(φ): сумма первых n цифр не меньше φ(n)."""
    if (phi is None) == (family is None):
        raise ValidationError("Укажите либо --phi, либо --family")
    tol = validate_tolerance(tol) if tol is not None else None
    if family is not None:
        params = {"r": r_value, "d": d_value, "gamma": gamma, "c": named.get("const_c"), "remainder": remainder}
        descriptor = model_or_usage(SumDescriptor, family=family, **{k: v for k, v in params.items() if v is not None})
        query = {"command": "dim sum", **descriptor.model_dump(mode="json")}
    else:
        descriptor, constants = _function_expression(phi, consts, named)
        query = {"command": "dim sum", "phi": phi, **constants}
    result = obj.dimensions.dim_sum_family(descriptor, tol, n_max)
    return obj.emit(dimension_report(obj, query, result))


@dim.command("liao-rams")
@click.option("--u", "u_expr", required=True, help="Выражение u_n")
@click.option("--v", "v_expr", required=True, help="Выражение v_n")
@click.option("--depth", type=int, default=50, show_default=True, help="Горизонт по n")
@const_options
@click.pass_obj
@handle_cli_errors
def dim_liao_rams(obj: CliContext, u_expr, v_expr, depth, consts, **named):
    """Оценка для множества u_n ≤ a_n < u_n + v_n."""
    constants = collect_constants(consts, **named)
    result = obj.dimensions.dim_liao_rams(Expression(u_expr, constants), Expression(v_expr, constants), depth)
    query = {"command": "dim liao-rams", "u": u_expr, "v": v_expr, "depth": depth, **constants}
    return obj.emit(dimension_report(obj, query, result))


@dim.command("spectrum")
@click.option("--tau", type=float, required=True, help="Уровень τ для log M_n/n")
@click.option("--kind", type=click.Choice(["limsup", "liminf"]), default="limsup", show_default=True)
@tol_option
@click.pass_obj
@handle_cli_errors
def dim_spectrum(obj: CliContext, tau, kind, tol):
    """Уровень спектра максимальной цифры."""
    tol = validate_tolerance(tol) if tol is not None else None
    result = obj.dimensions.dim_max_spectrum(tau, kind, tol)
    return obj.emit(dimension_report(obj, {"command": "dim spectrum", "tau": tau, "kind": kind}, result))


@dim.command("digits-inf")
@click.pass_obj
@handle_cli_errors
def dim_digits_inf(obj: CliContext):
    """Размерность множества {a_n → ∞}."""
    result = obj.dimensions.dim_digits_to_infinity()
    return obj.emit(dimension_report(obj, {"command": "dim digits-inf"}, result))


@dim.command("hat-scan")
@click.option("--log-c", type=float, required=True, help="log C")
@click.option("--points", type=int, default=200, show_default=True, help="Число точек сетки по γ")
@click.option("--no-certify", is_flag=True, help="Не вычислять сертифицированное θ̂")
@tol_option
@emit_plot_option
@click.pass_obj
@handle_cli_errors
def dim_hat_scan(obj: CliContext, log_c, points, no_certify, tol, emit_plot):
    """Корни уравнений типа III по γ и их максимум θ̂(log C)."""
    validate_positive_int(points, "points")
    tol = validate_tolerance(tol) if tol is not None else None
    gammas = np.linspace(0.05, 2.0, points)
    scan = obj.dimensions.type_three_scan(log_c, gammas, certify_hat=not no_certify, tol=tol)
    if emit_plot:
        write_plot(emit_plot, scan.gammas, scan.roots)
    report = Report(
        query={"command": "dim hat-scan", "log_C": log_c, "points": points},
        branch="type_three_scan",
        value_lo=scan.best_root,
        value_hi=scan.best_root,
        diagnostics={
            "best_gamma": scan.best_gamma,
            "predicted_gamma": scan.predicted_gamma,
            "theta_hat": scan.theta_hat,
        },
        provenance=obj.provenance(tol=tol),
    )
    return obj.emit(report)


@dim.command("good-bounds")
@click.option("--B", "B", type=float, required=True)
@click.option("--s", "s", type=float, required=True)
@click.pass_obj
@handle_cli_errors
def dim_good_bounds(obj: CliContext, B, s):
    """Элементарные оценки dim A(B) в точке s."""
    check = obj.dimensions.good_bounds_check(B, s)
    report = Report(
        query={"command": "dim good-bounds", "B": B, "s": s},
        branch="good_bounds",
        value_lo=s if check.lower_certified else None,
        value_hi=s if check.upper_certified else None,
        diagnostics=check.to_report(),
        provenance=obj.provenance(),
    )
    return obj.emit(report)


# profile

@cli.group()
def profile():
    """Диагностика последовательностей и функций."""


@profile.command("seq")
@triple_options
@click.pass_obj
@handle_cli_errors
def profile_seq(obj: CliContext, n_expr, s_expr, t_expr, alpha, beta, xi, gamma, k_max, skip_hypotheses, consts, **named):
    """Инварианты α, β, ξ, γ тройки и условия (H1)-(H3)."""
    constants = collect_constants(consts, **named)
    overrides = {"alpha": alpha, "beta": beta, "xi": xi, "gamma": gamma}
    triple = build_triple(n_expr, s_expr, t_expr, constants, overrides)
    growth = obj.profiles.growth_profile(triple, k_max, triple.overrides)
    diagnostics: Dict[str, Any] = {
        name: str(getattr(growth, name)) for name in ("alpha", "beta", "xi", "gamma")
    }
    diagnostics["converged"] = growth.converged
    diagnostics["overridden"] = growth.overridden
    if not skip_hypotheses:
        hypotheses = obj.profiles.check_hypotheses(triple, k_max)
        diagnostics["hypotheses"] = {name: getattr(hypotheses, name).value for name in ("h1", "h2", "h3")}
    report = Report(
        query={"command": "profile seq", "n": n_expr, "s": s_expr, "t": t_expr, **constants},
        branch="growth_profile",
        diagnostics=diagnostics,
        provenance=obj.provenance(n=growth.k_max),
    )
    return obj.emit(report)


@profile.command("fn")
@click.option("--psi", required=True, help="Выражение ψ(n)")
@click.option("--n-max", type=int, default=None)
@click.option("--as-sum", is_flag=True, help="Добавить ветку классификатора S(φ)")
@const_options
@click.pass_obj
@handle_cli_errors
def profile_fn(obj: CliContext, psi, n_max, as_sum, consts, **named):
    """Инварианты B_ψ, b_ψ, C_ψ, c_ψ и условия роста функции."""
    constants = collect_constants(consts, **named)
    expression = Expression(psi, constants)
    fp = obj.profiles.function_profile(expression, n_max)
    diagnostics: Dict[str, Any] = {
        "log_B_psi": str(fp.log_B_psi),
        "log_b_psi": str(fp.log_b_psi),
        "log_C_psi": str(fp.log_C_psi),
        "log_c_psi": str(fp.log_c_psi),
        "limit_flag": fp.limit_flag,
        "sqrt_scale_limsup": str(fp.sqrt_scale_limsup),
        "linear_scale_limsup": str(fp.linear_scale_limsup),
        "superlinear": fp.superlinear.value,
        "condition_ed": fp.condition_ed.value,
        "condition_maxine": fp.condition_maxine.value,
        "converged": fp.converged,
    }
    if as_sum:
        classification = obj.profiles.classify_sum_function(expression, n_max)
        diagnostics["sum_branch"] = classification.branch.value
        diagnostics["sum_notes"] = classification.notes
    report = Report(
        query={"command": "profile fn", "psi": psi, **constants},
        branch="function_profile",
        diagnostics=diagnostics,
        provenance=obj.provenance(n=fp.n_max),
    )
    return obj.emit(report)


# verify

@cli.group()
def verify():
    """Переборные оракулы и эмпирические оценки."""


@verify.command("bands")
@click.option("--k", "k", type=int, required=True, help="Длина слов")
@click.option("--cap", "digit_cap", type=int, default=None, help="M: ограничение цифр")
@click.option("--m-max", type=int, default=None, help="Наибольшая полоса m")
@click.pass_obj
@handle_cli_errors
def verify_bands(obj: CliContext, k, digit_cap, m_max):
    """Число слов длины k по двоичным полосам длины цилиндра."""
    result = obj.empirical.band_counts(k, m_max, digit_cap)
    report = Report(
        query={"command": "verify bands", "k": k, "M": digit_cap, "m_max": m_max},
        branch="band_counts",
        diagnostics={"table": result.table, "total": result.total, "nodes": result.nodes, "m_max": result.m_max},
        provenance=obj.provenance(M=digit_cap, n=k),
    )
    return obj.emit(report)


@verify.command("lemma-np")
@click.option("--theta", type=float, required=True)
@click.option("--eps", type=float, default=0.1, show_default=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--mode", type=click.Choice([m.value for m in LemmaMode]), default=LemmaMode.FULL.value, show_default=True)
@click.option("--cap", "digit_cap", type=int, default=None)
@click.option("--m-max", type=int, default=None)
@click.pass_obj
@handle_cli_errors
def verify_lemma_np(obj: CliContext, theta, eps, k, mode, digit_cap, m_max):
    """Поиск полосы m, где слов больше порога."""
    result = obj.empirical.verify_lemma_np(theta, eps, k, LemmaMode(mode), digit_cap, m_max)
    report = Report(
        query={"command": "verify lemma-np", "theta": theta, "eps": eps, "k": k, "mode": mode, "M": digit_cap},
        branch="lemma_np_found" if result.found else "lemma_np_not_found",
        diagnostics=result.to_report(),
        provenance=obj.provenance(M=digit_cap, n=k),
    )
    return obj.emit(report)


@verify.command("cover")
@click.option("--cap", "digit_bound", type=int, required=True, help="M: граница свободных цифр")
@click.option("--depth", type=int, default=None, help="Глубина покрытия F_M")
@click.option("--n", "n_expr", default=None, help="Выражение n_k")
@click.option("--s", "s_expr", default=None, help="Выражение s_k")
@click.option("--t", "t_expr", default=None, help="Выражение t_k")
@click.option("--levels", type=int, default=12, show_default=True)
@click.option("--scheme", type=click.Choice([s.value for s in CoverScheme]), default=CoverScheme.NATURAL.value)
@click.option("--k0", "k_0", type=int, default=None, help="Длина блока блочной схемы")
@click.option("--m0", "m_0", type=int, default=None, help="Полоса блоков блочной схемы")
@click.option("--plot-series", type=click.Choice(["falconer", "covering"]), default="falconer", show_default=True)
@emit_plot_option
@const_options
@click.pass_obj
@handle_cli_errors
def verify_cover(obj: CliContext, digit_bound, depth, n_expr, s_expr, t_expr, levels, scheme, k_0, m_0, plot_series, emit_plot, consts, **named):
    """Оценки Фалконера (снизу) и по покрытиям (сверху) по уровням покрытия."""
    service = obj.empirical
    query: Dict[str, Any] = {"command": "verify cover", "M": digit_bound}
    given = [expr is not None for expr in (n_expr, s_expr, t_expr)]
    if any(given) and not all(given):
        raise ValidationError("--n, --s и --t задаются вместе")
    if all(given):
        constants = collect_constants(consts, **named)
        triple = build_triple(n_expr, s_expr, t_expr, constants, {})
        params = None
        if (k_0 is None) != (m_0 is None):
            raise ValidationError("--k0 и --m0 задаются вместе")
        if k_0 is not None:
            params = model_or_usage(ConstructionParams, k_0=k_0, m_0=m_0)
        cover = service.build_cover(triple, digit_bound, levels, CoverScheme(scheme), params)
        query.update({"n": n_expr, "s": s_expr, "t": t_expr, "levels": levels, "scheme": scheme, **constants})
    else:
        if depth is None:
            raise ValidationError("Укажите --depth для покрытия F_M или тройку --n/--s/--t")
        cover = service.bounded_cover(digit_bound, depth)
        query["depth"] = depth

    falconer = service.falconer_estimate(cover)
    covering = service.covering_estimate(cover)
    if emit_plot:
        series = falconer if plot_series == "falconer" else covering
        write_plot(emit_plot, series.levels, series.values)
    report = Report(
        query=query,
        branch="cover_estimates",
        value_lo=falconer.final,
        value_hi=covering.final,
        diagnostics={
            "falconer": falconer.to_report(),
            "covering": covering.to_report(),
            "levels": len(cover),
        },
        provenance=obj.provenance(M=digit_bound, n=cover[-1].depth),
    )
    return obj.emit(report)


@verify.command("stopping")
@click.option("--cap", "digit_cap", type=int, required=True)
@click.option("--m", "m_values", type=int, multiple=True, help="Масштабы m (длина < 2^-m)")
@emit_plot_option
@click.pass_obj
@handle_cli_errors
def verify_stopping(obj: CliContext, digit_cap, m_values, emit_plot):
    """Покрытие F_M минимальными цилиндрами длины < 2^-m."""
    m_values = list(m_values) or [10, 15, 20]
    result = obj.empirical.stopping_cover_counts(digit_cap, m_values)
    if emit_plot:
        write_plot(emit_plot, result.m_values, [math.log2(count) for count in result.counts])
    report = Report(
        query={"command": "verify stopping", "M": digit_cap, "m": result.m_values},
        branch="stopping_cover",
        value_lo=result.estimate,
        value_hi=result.estimate,
        diagnostics=result.to_report(),
        provenance=obj.provenance(M=digit_cap),
    )
    return obj.emit(report)


@verify.command("wang-wu")
@click.option("--B", "B", type=float, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--A", "digit_truncation", type=int, default=64, show_default=True, help="Явные цифры до хвоста")
@click.option("--enumerate", "enumerated", is_flag=True, help="Строгая скобка перебором слов (малые n)")
@click.option("--cap", "digit_cap", type=int, default=None, help="M для перебора (по умолчанию M^n ≤ 2^20)")
@click.pass_obj
@handle_cli_errors
def verify_wang_wu(obj: CliContext, B, n, digit_truncation, enumerated, digit_cap):
    """Скобка для s_n(B)."""
    if enumerated:
        result = obj.empirical.wang_wu_enumerated(B, n, digit_cap)
    else:
        result = obj.empirical.wang_wu_s_n(B, n, digit_truncation)
    report = Report(
        query={"command": "verify wang-wu", "B": B, "n": n, "A": digit_truncation, "enumerate": enumerated},
        branch="wang_wu",
        value_lo=result.lower,
        value_hi=result.upper,
        diagnostics={
            "tail_bound": result.tail_bound,
            "evaluations": result.evaluations,
            "method": result.method.value,
            "certified": result.certified,
        },
        provenance=obj.provenance(M=result.digit_truncation, n=n),
    )
    return obj.emit(report)


@as_usage_errors
def parse_digits(text: str) -> List[int]:
    try:
        digits = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"Набор цифр должен быть списком через запятую: {text!r}")
    return validate_digits(digits)


@as_usage_errors
def parse_scales(text: str) -> List[float]:
    """Масштабы через запятую, от крупного к мелкому."""
    try:
        scales = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"Масштабы должны быть списком чисел через запятую: {text!r}")
    return validate_scales(scales)


@verify.command("boxcount")
@click.option("--cap", "digit_cap", type=int, default=None, help="Цифры 1..M")
@click.option("--digits", default=None, help="Явный набор цифр, например 1,2")
@click.option("--count", type=int, default=100_000, show_default=True)
@click.option("--depth", type=int, default=20, show_default=True)
@click.option("--scales", default=None, help="Масштабы через запятую, например 0.1,0.01,0.001")
@emit_plot_option
@click.pass_obj
@handle_cli_errors
def verify_boxcount(obj: CliContext, digit_cap, digits, count, depth, scales, emit_plot):
    """Наклон подсчёта ящиков по случайной выборке точек."""
    if (digit_cap is None) == (digits is None):
        raise ValidationError("Укажите либо --cap, либо --digits")
    source: Any = digit_cap if digit_cap is not None else parse_digits(digits)
    validate_positive_int(count, "count")
    grid = parse_scales(scales) if scales is not None else None
    result = obj.empirical.boxcount_sample(source, count, depth, grid, seed=obj.config.seed)
    if emit_plot:
        write_plot(emit_plot, [-math.log(s) for s in result.scales], [math.log(c) for c in result.counts])
    report = Report(
        query={"command": "verify boxcount", "M": digit_cap, "digits": digits, "count": count, "depth": depth, "scales": scales},
        branch="boxcount",
        value_lo=result.slope,
        value_hi=result.slope,
        diagnostics=result.to_report(),
        provenance=obj.provenance(M=digit_cap, n=depth),
    )
    return obj.emit(report)


# Точка входа

def execute(argv: Optional[Sequence[str]] = None) -> int:
    """
    Выполнить команду и вернуть код выхода.

    Ошибки разбора аргументов click дают 64, доменные ошибки 2,
    исчерпание бюджета 3.
    """
    args = list(sys.argv[1:] if argv is None else argv)
    try:
        result = cli.main(args=args, prog_name="cfdim", standalone_mode=False)
    except click.exceptions.Abort:
        logger.warning("Aborted by user")
        return 1
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except SystemExit as e:
        if e.code is None:
            return EXIT_OK
        return e.code if isinstance(e.code, int) else 1
    finally:
        log_run_shutdown()
    return result if isinstance(result, int) else EXIT_OK


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
