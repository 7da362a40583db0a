"""Exceptions module."""


class TwistedMomentsError(Exception):
    """Base error of this package."""


class ConfigError(TwistedMomentsError):
    """Invalid scan or CLI configuration."""


class NotCoprimeError(TwistedMomentsError, ValueError):
    """Arguments that must be coprime share a factor."""


class DomainError(TwistedMomentsError, ValueError):
    """Argument outside the domain of a function."""


class OverflowBudgetError(TwistedMomentsError):
    """Brute-force evaluation would exceed its work budget."""


class ConventionUnresolvedError(TwistedMomentsError):
    """No candidate sign or orientation reproduces the brute-force oracle."""


class QuadratureNonConvergenceError(TwistedMomentsError):
    """Adaptive quadrature exhausted its panel budget."""


class StationaryPointOutsideSupportError(TwistedMomentsError):
    """The stationary point does not lie in the cutoff support."""


class TruncationTooSmallError(TwistedMomentsError):
    """Truncated sums drop terms above the tolerance."""


class EmptySpaceError(TwistedMomentsError):
    """The space of cusp forms is zero dimensional."""


class EigenspaceDegenerateError(TwistedMomentsError):
    """Hecke operators did not separate the eigenspaces."""


class EigendataFormatError(TwistedMomentsError):
    """Eigendata file does not follow the expected format."""


class InvariantViolationError(TwistedMomentsError):
    """Eigendata fails one of the newform invariants."""

    def __init__(self, invariant: str, n: int, detail: str = "") -> None:
        self.invariant = invariant
        self.n = n
        message = f"{invariant} violated at n={n}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class TailBudgetExceededError(TwistedMomentsError):
    """No admissible truncation meets the tail tolerance."""


class IllConditionedError(TwistedMomentsError):
    """Linear system too ill conditioned to solve reliably."""


class NonPositiveWeightError(TwistedMomentsError):
    """A solved harmonic weight is not positive."""


class SystemSingularError(TwistedMomentsError):
    """Root number system is singular."""


class NumericallyUnstableError(TwistedMomentsError):
    """Computed root number is not of modulus one."""


class EigendataTooShortError(TwistedMomentsError):
    """Eigendata does not reach the required length."""

    def __init__(self, required: int, available: int) -> None:
        self.required = required
        self.available = available
        super().__init__(
            f"eigendata covers n <= {available}, but n <= {required} is required"
        )
