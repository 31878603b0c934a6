"""Exception hierarchy for the quantropy package."""


class QuantropyError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(QuantropyError, ValueError):
    """A value violates the invariants of the type it is meant to build."""


class InadmissibleClassicality(InvalidInput):
    """Classicality outside the closed right half-plane, or zero."""


class NonFiniteAction(InvalidInput):
    pass


class ZeroPartitionFunction(QuantropyError, ArithmeticError):
    """The partition function cancelled (numerically) to zero.

    Raised on exact destructive interference, or when the sum lost so many
    digits to cancellation that the normalized amplitudes are meaningless.
    """


class StepTooLarge(QuantropyError, ArithmeticError):
    """Central difference straddled a branch cut of the principal log."""


class SizeOverflow(QuantropyError, OverflowError):
    pass


class AmplitudeNearZero(QuantropyError, ArithmeticError):
    pass


class DivergentIntegral(QuantropyError, ArithmeticError):
    pass


class NoConvergence(QuantropyError, ArithmeticError):
    """Successive extrapolants still disagree after all levels."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InvariantViolation(QuantropyError, AssertionError):
    pass
