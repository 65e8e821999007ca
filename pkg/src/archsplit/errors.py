class ArchsplitError(Exception):
    """Base class for errors raised by archsplit."""


class DataError(ArchsplitError, ValueError):
    """Input data could not be read or violates a data contract."""


class ConfigError(ArchsplitError, ValueError):
    """An argument or configuration value is out of range."""
