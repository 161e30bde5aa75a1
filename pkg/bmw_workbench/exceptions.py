"""
Error hierarchy for the BMW workbench.

Every failure raised by the library derives from ``WorkbenchError`` so that the
command-line layer can report it uniformly.
"""

from typing import Any, Optional


class WorkbenchError(Exception):
    """Base class for all workbench errors."""


class ScalarError(WorkbenchError, ArithmeticError):
    """Invalid exact scalar operation."""


class ZeroDivisionScalarError(ScalarError, ZeroDivisionError):
    """Inverse or quotient by the zero scalar."""


class PoleAtOneError(ScalarError):
    """Specialization q -> 1 of a scalar whose denominator vanishes at 1."""


class RankMismatchError(WorkbenchError, ValueError):
    """Operands belong to algebras of different rank r."""


class IndexRangeError(WorkbenchError, IndexError):
    """Generator or tensor-factor index outside 1..r-1."""


class RankTooSmallError(WorkbenchError, ValueError):
    """A named element was requested at a rank where it does not exist."""


class ResourceGuardError(WorkbenchError):
    """A computation was requested beyond its configured rank cap."""

    def __init__(self, operation: str, r: int, limit: int):
        self.operation = operation
        self.r = r
        self.limit = limit
        super().__init__(f"{operation} is limited to r <= {limit} (requested r = {r})")


class RewriteLimitError(WorkbenchError, RuntimeError):
    """The BMW reduction engine exceeded its step budget."""

    def __init__(self, word: Any, steps: int):
        self.word = word
        self.steps = steps
        super().__init__(f"Reduction exceeded {steps} steps on word {word!r}")


class NotStarStableError(WorkbenchError, ValueError):
    """A subspace expected to satisfy J* = J does not."""


class VerificationError(WorkbenchError, AssertionError):
    """An identity or theorem check failed."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        self.witness = witness
        super().__init__(message)


class CacheError(WorkbenchError):
    """A cache file is unreadable, stale or fails validation."""
