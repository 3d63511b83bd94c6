"""
Error types raised by the Hilbert scheme toolkit.

Every error carries the process exit code the CLI reports for it and, when
known, the path (file or JSON path) of the offending input.
"""
from typing import Optional


class HilbertError(Exception):
    """Base class for domain errors."""

    exit_code: int = 1

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.path = path

    def __str__(self) -> str:
        if self.path:
            return f"{self.message} (at {self.path})"
        return self.message


class FieldMismatchError(HilbertError):
    pass


class ShapeError(HilbertError):
    pass


class SingularMatrixError(HilbertError):
    pass


class UnsupportedFieldError(HilbertError):
    pass


class ArityError(HilbertError):
    pass


class BadDenominatorError(HilbertError):
    """A rational whose denominator vanishes modulo the target prime."""


class InvalidPointError(HilbertError):
    """The point fails the relations or its vector is not cyclic."""


class NotInChartError(HilbertError):
    pass


class NotCoveredError(HilbertError):
    """No chart of the requested family contains the point."""


class SupportConditionError(HilbertError):
    pass


class RelationFailureError(HilbertError):
    pass


class LinearizedRelationError(HilbertError):
    pass


class BudgetExceededError(HilbertError):
    pass


class FreeActionViolation(HilbertError):
    """Orbit bookkeeping contradicts freeness of the GL_n action."""


class NotAQuotientError(HilbertError):
    pass


class FreeAlgebraRequiredError(HilbertError):
    pass


class DocumentError(HilbertError):
    """Malformed or unreadable JSON input."""


class ConfigurationError(HilbertError):
    pass


class UsageError(HilbertError):
    exit_code = 2
