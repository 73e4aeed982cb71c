"""Exception hierarchy for the toeplab package.

Everything raised on purpose derives from ToeplabError so callers can
catch the package's failures without catching genuine bugs.
"""

from __future__ import annotations


class ToeplabError(Exception):
    """Base class for all deliberate toeplab failures."""


class ContractViolation(ToeplabError):
    """An operation was called with arguments that break its contract,
    e.g. mixing truncated series of different orders."""


class DomainError(ToeplabError):
    """A value lies outside the mathematical domain of an operation."""


class NotInvertible(ToeplabError):
    """Inversion was requested for a ring element with no inverse
    (zero constant term, zero leading coefficient, and so on)."""


class UnclassifiableWeight(ToeplabError):
    """The weight does not fall in any of the supported recursion
    classes (e.g. a repeated binomial root with both exponent groups
    active)."""


class UnsupportedExactWeight(ToeplabError):
    """The weight has no exact rational moment expansion in the
    requested mode (e.g. numeric exponential parameters on both
    sides)."""


class SingularTau(ToeplabError):
    """A Toeplitz determinant that must be invertible vanished.

    Carries the index n of the offending determinant.
    """

    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"tau_{n} is not invertible")


class SingularVariable(ToeplabError):
    """A lattice variable that appears in a denominator is zero or has
    zero constant term. Carries the index n."""

    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"variable at index {n} is not invertible")


class InsufficientState(ToeplabError):
    """A computation needs lattice values beyond the window that was
    supplied."""


class UnsolvableStep(ToeplabError):
    """The linear system for the next lattice step is degenerate at
    index n."""

    def __init__(self, n: int, message: str | None = None):
        self.n = n
        super().__init__(message or f"recursion step to index {n} is degenerate")


class ConsistencyFailure(ToeplabError):
    """Two independent computations of the same quantity disagree."""


class IdentityFailure(ToeplabError):
    """An identity that should hold exactly has a nonzero residual."""


class ConfinementFailure(ToeplabError):
    """The singularity confinement pattern did not hold."""


class IntegrationDiverged(ToeplabError):
    """Numerical flow integration produced non-finite values."""


class RefusedSize(ToeplabError):
    """The request would exceed the configured size guard."""


class PrecisionExceeded(ToeplabError):
    """A truncated-precision value was asked for coefficients beyond
    its tracked validity."""
