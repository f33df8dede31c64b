"""Exception hierarchy shared by all circleconv modules."""


class CircleConvError(Exception):
    """Base class for errors raised by circleconv."""


class SpecParseError(CircleConvError):
    """A measure or sequence spec string could not be parsed."""


class CapExceededError(CircleConvError):
    """A computation would exceed a configured size cap."""


class NumericError(CircleConvError):
    """A numeric sanity check failed (drift, non-convergence, ...)."""


class UnsupportedMeasureError(CircleConvError):
    """The requested operation is not defined for this measure kind."""


class NotLinearRecursionError(CircleConvError):
    """No linear recursion of admissible degree fits the sequence."""
