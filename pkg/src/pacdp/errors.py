"""Exception types shared across the package."""


class PacdpError(Exception):
    """Base class for all package errors."""


class InvalidArgument(PacdpError, ValueError):
    """A caller-supplied value violates a documented precondition."""


class ConfigError(PacdpError, ValueError):
    """A configuration file or CLI request is malformed."""


class DegenerateDataError(PacdpError):
    """The data admit no meaningful estimate (e.g. too few uncensored values)."""


class EstimationError(PacdpError):
    """An iterative estimation procedure failed to converge.

    Carries the last iterate so callers can log diagnostics.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate
