"""Exception hierarchy shared by every econofit module."""

from __future__ import annotations

from typing import Any


class EconofitError(Exception):
    """Base class for all library errors."""


class ParseError(EconofitError):
    """A CSV row could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(EconofitError, ValueError):
    """Parsed data violates a domain invariant."""


class IncompatibleSeriesError(ValidationError):
    """Two series cannot be combined (kind, variable, unit or length differ)."""


class InsufficientDataError(EconofitError, ValueError):
    """Too few points survive for the requested operation."""


class DomainError(EconofitError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""

    def __init__(self, message: str, t: float | None = None):
        self.t = t
        super().__init__(message)


class UnsupportedKindError(ValidationError):
    pass


class UnknownModelError(EconofitError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown model"


class UnknownParameterError(EconofitError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown parameter"


class FitError(EconofitError):
    """Optimisation diverged; ``best_params`` holds the best finite iterate."""

    def __init__(self, message: str, best_params: Any = None):
        self.best_params = best_params
        super().__init__(message)


class SingularFitError(FitError):
    """Design matrix is rank deficient."""


class FlatDataError(FitError):
    """Probability values are constant, so no shape can be estimated."""


class SingularityError(DomainError):
    """Euler-equation right-hand side is undefined at this consumption level."""


class PositivityError(DomainError):
    """A consumption path dropped to zero or below."""


class BatchError(EconofitError):
    """Every year of a batch failed."""

    def __init__(self, message: str, failures: dict[int, str] | None = None):
        self.failures = dict(failures or {})
        super().__init__(message)


class ReportError(EconofitError):
    """No correlation pairing had enough overlapping years."""
