"""Exception hierarchy for the opqueue package.

Public functions never raise bare ``ValueError``/``ArithmeticError``; they
raise one of the semantic classes below so callers (and the CLI) can map
failures to outcomes without string matching.
"""

__all__ = [
    "OpqueueError",
    "DomainError",
    "NoSolutionError",
    "NumericError",
    "CapacityError",
    "ConfigError",
]


class OpqueueError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(OpqueueError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NoSolutionError(OpqueueError, ValueError):
    """A well-posed query has no solution (e.g. inverting above a maximum)."""


class NumericError(OpqueueError, ArithmeticError):
    """A numerical procedure failed: bracket expansion exhausted, bisection
    did not converge, or a computed solution failed its verification."""


class CapacityError(OpqueueError):
    """A request exceeds a documented resource cap (e.g. horizon length)."""


class ConfigError(OpqueueError, ValueError):
    """A scenario configuration is malformed or inconsistent."""
