"""Exception hierarchy shared by every divkit module."""


class DivkitError(Exception):
    """Base class; the CLI maps any subclass to exit status 1."""

    kind = "error"


class DomainError(DivkitError, ValueError):
    kind = "domain"


class CapacityError(DivkitError):
    kind = "capacity"


class NumericError(DivkitError, ArithmeticError):
    kind = "numeric"


class SamplingError(DivkitError):
    kind = "sampling"
