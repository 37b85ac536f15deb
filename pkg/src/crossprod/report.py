"""Residual bookkeeping shared by the validation routines and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Residual:
    where: str
    value: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.value) and self.value <= self.tol


@dataclass
class CheckReport:
    """All residuals gathered for one named identity."""

    name: str
    tol: float
    residuals: list[Residual] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, where: str, value: float, tol: float | None = None) -> Residual:
        r = Residual(where, float(value), self.tol if tol is None else tol)
        self.residuals.append(r)
        return r

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals)

    @property
    def max_residual(self) -> float:
        return max((r.value for r in self.residuals), default=0.0)

    @property
    def failures(self) -> list[Residual]:
        return [r for r in self.residuals if not r.passed]

    def to_json(self, max_failures: int = 10) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "count": len(self.residuals),
            "max_residual": self.max_residual,
            "tol": self.tol,
            "failures": [
                {"where": r.where, "residual": r.value} for r in self.failures[:max_failures]
            ],
            "notes": list(self.notes),
        }

    def __str__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: max residual {self.max_residual:.3e} (tol {self.tol:g}, n={len(self.residuals)})"


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
