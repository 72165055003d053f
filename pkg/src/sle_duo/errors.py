"""Exception types shared across the package.

The CLI maps these onto its exit-code vocabulary: usage/domain problems
exit 2, numerical or statistical failures exit 1, I/O failures exit 3.
"""


class SleDuoError(Exception):
    """Base class for package errors."""


class DomainError(SleDuoError, ValueError):
    """Input outside the mathematical domain of an operation (poles, branch limits)."""


class UsageError(SleDuoError, ValueError):
    """Structurally invalid request (unsupported parameter set, bad grid, bad config)."""


class NumericalError(SleDuoError, ArithmeticError):
    """A numerical procedure failed to converge to the requested tolerance."""


class StatisticalQualityError(SleDuoError, RuntimeError):
    """A Monte Carlo result does not meet the required resolution quality."""


class InternalError(SleDuoError, RuntimeError):
    """Invariant violated inside the library; indicates a bug, not bad input."""
