"""
Модель отчёта CLI.
"""

from typing import Any, Dict, Optional

from pydantic import Field

from .base import BaseModel, jsonable


class Provenance(BaseModel):
    """Происхождение результата: M, глубина n, допуск и время счёта."""

    M: Optional[int] = None
    n: Optional[int] = None
    tol: Optional[float] = None
    runtime: Optional[float] = None


class Report(BaseModel):
    """Отчёт команды: {query, branch, value_lo, value_hi, diagnostics, provenance}."""

    query: Dict[str, Any] = Field(default_factory=dict)
    branch: str
    value_lo: Optional[float] = None
    value_hi: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
    provenance: Provenance = Field(default_factory=Provenance)

    def to_report(self) -> dict:
        """Словарь с фиксированным порядком ключей верхнего уровня."""
        return {
            "query": jsonable(self.query),
            "branch": self.branch,
            "value_lo": jsonable(self.value_lo),
            "value_hi": jsonable(self.value_hi),
            "diagnostics": jsonable(self.diagnostics),
            "provenance": jsonable(self.provenance),
        }
