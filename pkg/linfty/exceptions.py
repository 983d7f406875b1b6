"""
Exception hierarchy for contract violations.

Mathematical check failures are never raised; they are recorded in a Report.
"""

from typing import Any, Optional


class LinftyError(Exception):
    """Base class for every error raised by the toolkit."""


class DegreeError(LinftyError):
    """A map or element does not respect the declared (bi)degrees or spaces."""


class DifferentialError(LinftyError):
    """A differential does not square to zero."""

    def __init__(self, message: str, witness: Optional[str] = None):
        super().__init__(message)
        self.witness = witness


class NotACocycleError(LinftyError):
    """An element handed to a cohomology projection is not closed."""


class NotMaurerCartanError(LinftyError):
    """An element expected to solve the Maurer-Cartan equation does not."""

    def __init__(self, message: str, residual: Any = None):
        super().__init__(message)
        self.residual = residual


class NotHarmonicError(LinftyError):
    """An element expected to be harmonic is not."""


class NotAProjectionError(LinftyError):
    """A linear map expected to be idempotent is not."""


class PreconditionError(LinftyError):
    """An operation precondition fails; ``witness`` names the failing input."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class MetricError(LinftyError):
    """A Gram matrix is not Hermitian, positive-definite and block-orthogonal."""


class InputError(LinftyError):
    """Malformed input file or manifest."""

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if path:
            location = f"{path}"
        if line is not None:
            location += f":{line}:{column or 0}"
        super().__init__(f"{location}: {message}" if location else message)
        self.path = path
        self.line = line
        self.column = column
