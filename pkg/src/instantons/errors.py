"""Exception and warning types raised by the pipeline stages."""


class InstantonError(Exception):
    """Base class for every numerical-stage failure."""


class NonAdjacentWells(InstantonError):
    pass


class QuadratureFailure(InstantonError):
    pass


class FitUnstable(InstantonError):
    pass


class FitDegenerate(InstantonError):
    pass


class ToleranceNotMet(InstantonError):
    pass


class OverflowUnrepresentable(InstantonError):
    pass


class Nonconvergence(InstantonError):
    pass


class UnconvergedBoundary(InstantonError):
    pass


class EnumerationTooLarge(InstantonError):
    pass


class ResolutionWarning(UserWarning):
    """The requested eigenvalue sits below the discretization error floor."""
