"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array lengths do not agree with the number of relays."""


class ParameterError(ValueError):
    """A scalar or configuration argument is outside its allowed range."""


class DegenerateChannelError(ValueError):
    """The channel carries no useful signal (e.g. an all-zero product channel)."""


class ContractViolation(ValueError):
    """A routine was called on inputs it does not support."""


class NumericalFailure(RuntimeError):
    """An iterative solver stopped without reaching its tolerance."""
