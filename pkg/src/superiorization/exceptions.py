"""Exception types raised by the library and mapped to CLI exit codes."""


class ConfigurationError(ValueError):
    """Malformed problem data or run configuration (CLI exit code 2)."""

    exit_code = 2


class NumericalDivergence(ArithmeticError):
    """An iterate became non-finite (CLI exit code 3)."""

    exit_code = 3


class NonConvergence(RuntimeError):
    """A proximity-terminated run hit its iteration cap (CLI exit code 4)."""

    exit_code = 4
