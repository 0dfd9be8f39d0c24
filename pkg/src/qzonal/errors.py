"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code so callers (and CI) can tell failure
modes apart without parsing messages.
"""


class QZonalError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QZonalError, ValueError):
    """Input violates a mathematical precondition (exit code 3)."""


class TruncationError(QZonalError, RuntimeError):
    """A series hit its degree cap without converging (exit code 4)."""


class DivergenceError(QZonalError, ValueError):
    """The requested series lies outside its convergence domain (exit code 5)."""
