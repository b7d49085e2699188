"""Exception types shared across the package."""


class TTError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class CapacityError(TTError):
    """A dense intermediate would exceed the configured element budget."""

    exit_code = 3


class DimensionMismatch(TTError, ValueError):
    """Physical dimensions or core counts of two operands disagree."""

    exit_code = 2


class ConfigError(TTError, ValueError):
    """Invalid parameters (kernel name, scales, derivative order, ...)."""

    exit_code = 2


class FormatError(TTError):
    """A serialized file is malformed or of the wrong kind."""

    exit_code = 4
