"""Exception and warning types raised across the package."""


class VSystemError(Exception):
    """Base class for all package errors."""


class ParameterError(VSystemError, ValueError):
    """Invalid physical parameters (CLI exit code 2)."""


class NumericalError(VSystemError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result (CLI exit code 3)."""


class NonPositiveRate(ParameterError):
    pass


class WrongBranch(ParameterError):
    """A δ₁ = 0 closed form was called with a nonzero pump detuning."""


class NegativeRadicand(NumericalError):
    """The ATS peak-position formula left its domain of validity."""


class SingularGenerator(NumericalError):
    def __init__(self, message, delta2=None, rcond=None):
        super().__init__(message)
        self.delta2 = delta2
        self.rcond = rcond


class UnstableStep(NumericalError):
    pass


class IllConditionedFit(NumericalError):
    pass


class NoPeaks(VSystemError, ValueError):
    pass


class UnknownFigure(VSystemError, KeyError):
    pass


class DegenerateCritical(UserWarning):
    """Parameters sit on the ATS/CIC border to within tolerance."""


class RegimeWarning(UserWarning):
    """A formula was used outside the regime it was derived for."""


class TrajectoryJump(UserWarning):
    """Pole continuation took an unexpectedly large step."""
