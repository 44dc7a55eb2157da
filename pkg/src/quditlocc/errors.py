"""Exception hierarchy shared by every module of the package."""


class QuditError(ValueError):
    """Base class for all package errors."""


class InvalidDimension(QuditError):
    pass


class InvalidDigit(QuditError):
    pass


class InvalidWire(QuditError):
    pass


class SameWire(InvalidWire):
    pass


class DimensionMismatch(QuditError):
    pass


class CapacityExceeded(QuditError):
    """Raised when a register would exceed the configured amplitude cap."""


class DegenerateState(QuditError):
    pass


class InvalidInput(QuditError):
    pass


class InvalidProtocol(QuditError):
    pass


class LocalityError(QuditError):
    """A scripted operation touched a wire its party does not hold."""


class StateFileError(QuditError):
    """A state file could not be parsed or failed normalization checks."""
