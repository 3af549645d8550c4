"""Exception types shared across the package.

Exit-code mapping used by the command line tool: configuration problems
exit 2, numerical failures exit 3, diagnostic band failures exit 4.
"""

from __future__ import annotations


class SteepError(Exception):
    """Base class for package errors."""


class ConfigurationError(SteepError, ValueError):
    """Invalid user-supplied configuration (bad ladder, weights, flags)."""


class DimensionMismatchError(ConfigurationError):
    """State dimension does not match the target's declared dimension."""

    def __init__(self, expected: int, actual: int):
        super().__init__(f"dimension mismatch: expected d={expected}, got d={actual}")
        self.expected = expected
        self.actual = actual


class NumericalError(SteepError, ArithmeticError):
    """Numerical invariant violated (non-stochastic row, NaN, failed quadrature)."""


class DiagnosticError(SteepError, RuntimeError):
    """A diagnostic procedure could not reach its goal (e.g. tuning ran away)."""
