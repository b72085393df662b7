"""Exception types raised by ovalbill."""


class BilliardError(Exception):
    """Base class for all errors raised by this package."""


class InvalidCurve(BilliardError):
    """Support function is malformed or outside the class of ovals."""


class InvalidResult(InvalidCurve):
    """A perturbation produced a function that is not a support function."""


class CurveFileError(InvalidCurve):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class InvalidAmplitude(InvalidCurve):
    pass


class DegenerateCircle(BilliardError):
    """The support function is constant, so critical points are not isolated."""


class SupportTooWide(BilliardError):
    """A bump perturbation overlaps points it must leave untouched."""


class GrazingOrbit(BilliardError):
    """|p| is too close to 1 for the next impact to be resolved."""


class RootNotBracketed(BilliardError):
    """The chord solver lost its bracket. Never expected on a valid oval."""


class StepError(BilliardError):
    """Wraps a failure during orbit iteration together with its index."""

    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"step {index}: {cause}")


class NotCritical(BilliardError):
    pass


class NotElliptic(BilliardError):
    pass


class NotHyperbolic(BilliardError):
    pass


class Resonant(BilliardError):
    pass


class EscapedNeighborhood(BilliardError):
    pass


class RefinementLimit(BilliardError):
    pass
