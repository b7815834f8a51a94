"""Exception hierarchy.  Every validation failure is an ``McvError``."""


class McvError(ValueError):
    """Base class for input/validation errors raised by this package."""


class NonFinite(McvError):
    pass


class DegenerateColumn(McvError):
    pass


class DimensionMismatch(McvError):
    pass


class WeightSum(McvError):
    pass


class NotPositiveDefinite(McvError):
    pass


class NoConvergence(McvError):
    pass


class ZeroMean(McvError):
    pass


class ZeroMeanForm(McvError):
    """Raised when m^T Sigma^-1 m vanishes."""


class ZeroWhitenedMean(McvError):
    pass


class ZeroCV(McvError):
    pass


class InvalidDirection(McvError):
    """Shift vector c violates c^T Sigma^-1 m >= 0."""


class NonConvergentSpec(McvError):
    pass
