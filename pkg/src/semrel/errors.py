"""Exception types shared across the package."""


class SemrelError(Exception):
    """Base class for errors raised by this package."""


class FormatError(SemrelError):
    """Malformed input data; messages carry line/field context."""


class ConfigError(SemrelError):
    """Invalid configuration value or flag combination."""


class InsufficientDataError(SemrelError):
    """Aggregate requested over too little data (all NA, or fewer than two pairs)."""
