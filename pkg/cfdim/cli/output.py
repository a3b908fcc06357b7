"""
Вывод отчётов: JSON, CSV и таблица rich, данные для графиков.
"""

import csv
import io
import json
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from loguru import logger
from rich.console import Console
from rich.table import Table

from cfdim.models.config import OutputFormat
from cfdim.models.report import Report


CSV_COLUMNS = ("query", "branch", "value_lo", "value_hi", "M", "n", "tol", "runtime")


def render_json(report: Report) -> str:
    return json.dumps(report.to_report(), ensure_ascii=False, indent=2)


def render_csv(report: Report) -> str:
    """Одна строка: значение и ветка, запрос свёрнут в key=value."""
    data = report.to_report()
    provenance = data["provenance"]
    query = ";".join(f"{key}={value}" for key, value in data["query"].items())
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerow(
        [
            query,
            data["branch"],
            data["value_lo"],
            data["value_hi"],
            provenance["M"],
            provenance["n"],
            provenance["tol"],
            provenance["runtime"],
        ]
    )
    return buffer.getvalue().rstrip("\n")


def render_table(report: Report) -> str:
    data = report.to_report()
    table = Table(title=f"cfdim: {data['branch']}")
    table.add_column("Поле", style="cyan")
    table.add_column("Значение")

    for key, value in data["query"].items():
        table.add_row(f"query.{key}", str(value))
    table.add_row("value_lo", str(data["value_lo"]))
    table.add_row("value_hi", str(data["value_hi"]))
    for key, value in data["provenance"].items():
        if value is not None:
            table.add_row(f"provenance.{key}", str(value))
    for key, value in data["diagnostics"].items():
        text = json.dumps(value, ensure_ascii=False) if isinstance(value, (dict, list)) else str(value)
        if len(text) > 120:
            text = text[:117] + "..."
        table.add_row(f"diagnostics.{key}", text)

    console = Console(file=io.StringIO(), width=160, color_system=None)
    console.print(table)
    return console.file.getvalue().rstrip("\n")


def render(report: Report, fmt: Union[OutputFormat, str]) -> str:
    """Отчёт в заданном формате."""
    fmt = OutputFormat(fmt)
    if fmt == OutputFormat.CSV:
        return render_csv(report)
    if fmt == OutputFormat.TABLE:
        return render_table(report)
    return render_json(report)


def write_plot(path: Union[str, Path], xs: Sequence[float], ys: Sequence[float]) -> Path:
    """CSV со столбцами x,y для построения графика."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)])
    np.savetxt(path, data, delimiter=",", header="x,y", comments="", fmt="%.12g")
    logger.info(f"Plot data written: {path} ({len(data)} points)")
    return path
