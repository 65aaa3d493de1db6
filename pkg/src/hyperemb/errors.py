"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: unknown tags, out-of-range values, bad flags."""


class DataError(ValueError):
    """Malformed or inconsistent input data (carries file/line context)."""


class NumericError(RuntimeError):
    """Numeric failure during optimization, e.g. a non-finite loss."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class HypergraphWarning(UserWarning):
    """Diagnostic warning: degenerate structure handled by a documented convention."""
