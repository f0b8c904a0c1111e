"""Exception types raised across the package."""


class HolonomyError(Exception):
    """Base class for every error raised by this package."""


class SourceTargetMismatch(HolonomyError):
    pass


class NotFinite(HolonomyError):
    pass


class NumericalFailure(HolonomyError):
    pass


class AmbiguousLift(HolonomyError):
    pass


class TagMismatch(HolonomyError):
    pass


class EndpointMismatch(HolonomyError):
    pass


class OutOfPatch(HolonomyError):
    pass


class NotConverged(HolonomyError):
    pass


class StepTooLarge(HolonomyError):
    pass


class UnsupportedFamily(HolonomyError):
    pass


class MethodDisagreement(HolonomyError):
    def __init__(self, message, lift=None, integral=None, snap_distance=None):
        super().__init__(message)
        self.lift = lift
        self.integral = integral
        self.snap_distance = snap_distance
