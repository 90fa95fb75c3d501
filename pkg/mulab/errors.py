"""mulab.errors

Exception hierarchy and structured failure records.

Kernels raise; experiment runners catch per replica and keep a FailureRecord
so that failures are counted instead of resampled.
"""

from __future__ import annotations

from enum import Enum
from typing import Any, Dict, NamedTuple, Optional


class MuLabError(Exception):
    """Base class for all mu-lab errors."""


class CapExceeded(MuLabError):
    """Input size is above a configured kernel cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap

    def __reduce__(self):
        return type(self), (self.what, self.size, self.cap)


class RetryLimit(MuLabError):
    """A rejection sampler gave up."""

    def __init__(self, what: str, attempts: int):
        super().__init__(f"{what}: no acceptance after {attempts} attempts")
        self.what = what
        self.attempts = attempts

    def __reduce__(self):
        return type(self), (self.what, self.attempts)


class DomainError(MuLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PathNotInduced(MuLabError):
    """A vertex sequence is not an induced path of the graph."""


class DegreeTooLow(MuLabError):
    """A path vertex has no neighbour off the path."""


class NotRegular(MuLabError):
    """Operation requires a regular graph."""


class GraphFormatError(MuLabError, ValueError):
    """Malformed graph6 / edge-list / tree text."""


class UsageError(MuLabError):
    """Bad CLI or spec-file usage."""


class ErrorSeverity(str, Enum):
    """Severity levels for structured failure records."""

    WARNING = "warning"
    ERROR = "error"
    CRITICAL = "critical"


class ErrorCategory(str, Enum):
    """Failure categories used in experiment results."""

    VALIDATION = "validation"
    CAP = "cap"
    SAMPLING = "sampling"
    IO = "io"
    USAGE = "usage"


class FailureRecord(NamedTuple):
    """Structured information about one failed replica."""

    category: ErrorCategory
    severity: ErrorSeverity
    message: str
    replica: Optional[int] = None
    details: Optional[Dict[str, Any]] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "category": self.category.value,
            "severity": self.severity.value,
            "message": self.message,
            "replica": self.replica,
            "details": dict(self.details) if self.details else None,
        }


def categorize(exc: BaseException) -> ErrorCategory:
    if isinstance(exc, CapExceeded):
        return ErrorCategory.CAP
    if isinstance(exc, RetryLimit):
        return ErrorCategory.SAMPLING
    if isinstance(exc, GraphFormatError):
        return ErrorCategory.IO
    if isinstance(exc, UsageError):
        return ErrorCategory.USAGE
    return ErrorCategory.VALIDATION


def failure_from_exception(exc: BaseException, replica: Optional[int] = None) -> FailureRecord:
    details: Dict[str, Any] = {"type": type(exc).__name__}
    if isinstance(exc, CapExceeded):
        details.update(size=exc.size, cap=exc.cap)
    elif isinstance(exc, RetryLimit):
        details.update(attempts=exc.attempts)
    return FailureRecord(
        category=categorize(exc),
        severity=ErrorSeverity.ERROR,
        message=str(exc),
        replica=replica,
        details=details,
    )
