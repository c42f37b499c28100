"""Exception types raised across the package."""

from __future__ import annotations


class StackelError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInputError(StackelError, ZeroDivisionError):
    """A zero denominator or an otherwise degenerate algebraic input."""


class UsageError(StackelError, ValueError):
    """An operation was called with arguments outside its contract."""


class ParseError(StackelError, ValueError):
    """Syntax or name-resolution failure in the expression language."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class NotASymmetryError(StackelError):
    """A transform precondition failed: the input does not commute with H.

    ``residual`` holds the offending bracket or commutator.
    """

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class GradingError(StackelError):
    """Momentum/parameter grading requirements are violated."""


class DecompositionError(StackelError):
    """An alpha-decomposition fails its identities at some grade."""

    def __init__(self, message: str, grade=None, residual=None):
        super().__init__(message)
        self.grade = grade
        self.residual = residual


class SingularPointError(StackelError, ValueError):
    """Numeric evaluation hit a singular locus (zero denominator, sqrt of a negative)."""


class SamplingError(StackelError):
    """No regular sample point could be found."""
