"""Exception hierarchy for lagtorus."""


class LagtorusError(Exception):
    """Base class for all toolkit errors."""


class ZeroVector(LagtorusError, ValueError):
    pass


class ConstraintViolation(LagtorusError, ValueError):
    pass


class ZeroMomentum(LagtorusError, ValueError):
    pass


class NonClosedBoundary(LagtorusError):
    pass


class FrameDegeneracy(LagtorusError):
    pass


class ResolutionTooLow(LagtorusError):
    pass


class NonInteger(LagtorusError):
    pass


class InvalidPlaneLoop(LagtorusError, ValueError):
    """A LagrangianPlaneLoop sample breaks one of the loop invariants."""


class MonotonicityViolation(LagtorusError):
    pass


class StepTooLarge(LagtorusError):
    pass


class IndexGap(LagtorusError, ValueError):
    pass


class ClusterAmbiguity(LagtorusError):
    pass


class NotAComplex(LagtorusError):
    pass


class NotMorse(LagtorusError):
    pass


class DegenerateIndexPattern(LagtorusError, ValueError):
    pass


class DuplicateClaim(LagtorusError, ValueError):
    pass
