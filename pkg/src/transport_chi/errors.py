"""Exception types shared across the toolkit."""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the domain of the operation."""


class SpecError(ToolkitError, ValueError):
    """A distribution description is malformed or has invalid parameters."""


class ShapeError(ToolkitError, ValueError):
    """Array arguments have incompatible lengths."""


class EvaluationError(ToolkitError, ArithmeticError):
    """An integrand or target function returned a non-finite value."""

    def __init__(self, message: str, x: float | None = None):
        super().__init__(message)
        self.x = x


class AccuracyError(ToolkitError, ArithmeticError):
    """The requested accuracy was not reached within the work budget.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether a partial answer is usable.
    """

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class BracketError(ToolkitError, ValueError):
    """The root-finding bracket does not contain a sign change."""


class PositivityError(ToolkitError, ValueError):
    """A density required to be positive vanishes inside its support."""
