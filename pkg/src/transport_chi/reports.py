"""Outcome records for single inequality checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

REPORT_TOL = 1e-6


def report_tol(lhs: float, rhs: float) -> float:
    """``1e-6 * (1 + |lhs| + |rhs|)``; each side carries two quadratures' worth of error."""
    return REPORT_TOL * (1.0 + abs(lhs) + abs(rhs))


def encode(v: Any) -> Any:
    """JSON-safe view of a value: non-finite floats become strings."""
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, (float, int)) and not isinstance(v, bool):
        v = float(v) if isinstance(v, float) else v
        if isinstance(v, float) and not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return v
    if hasattr(v, "item") and callable(v.item):
        return encode(v.item())
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    return v


@dataclass
class InequalityReport:
    """``lhs <= rhs`` checked with the combined tolerance ``tol``.

    ``vacuous`` marks a pass that holds only because the right side is
    infinite (or the hypothesis of the statement fails), as opposed to a
    genuine numerical confirmation.
    """

    check: str
    lhs: float
    rhs: float
    constant: float
    lhs_label: str
    rhs_label: str
    tol: float | None = None
    vacuous: bool = False
    label: str = ""
    details: dict = field(default_factory=dict)
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        if self.tol is None:
            self.tol = report_tol(self.lhs, self.rhs) if math.isfinite(self.rhs) else math.inf
        if math.isinf(self.rhs) and self.rhs > 0:
            self.vacuous = True

    @property
    def margin(self) -> float:
        if math.isinf(self.rhs) and math.isinf(self.lhs):
            return math.nan
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        if self.vacuous:
            return True
        return self.lhs <= self.rhs + self.tol

    def to_dict(self) -> dict:
        return encode({
            "check": self.check,
            "label": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant": self.constant,
            "margin": self.margin,
            "passed": self.passed,
            "vacuous": self.vacuous,
            "tol": self.tol,
            "lhs_label": self.lhs_label,
            "rhs_label": self.rhs_label,
            "details": self.details,
            "settings": self.settings,
        })
