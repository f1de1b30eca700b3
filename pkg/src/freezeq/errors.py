"""Exception hierarchy; the CLI maps each class to an exit code."""


class FreezeqError(Exception):
    exit_code = 1


class ConfigurationError(FreezeqError, ValueError):
    """Invalid configuration or out-of-range construction parameter."""

    exit_code = 2


class ArgumentError(FreezeqError, ValueError):
    """Invalid argument passed to a library routine."""

    exit_code = 2


class ResourceError(FreezeqError):
    """Requested problem exceeds a hard resource cap (e.g. oracle width)."""

    exit_code = 3


class NumericError(FreezeqError, ArithmeticError):
    """Non-convergence or a failed numerical self-check."""

    exit_code = 4
