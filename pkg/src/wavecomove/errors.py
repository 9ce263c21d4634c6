"""Exception types. Each maps onto one CLI exit code."""


class WavecomoveError(Exception):
    exit_code = 3


class ConfigError(WavecomoveError, ValueError):
    """Malformed or inconsistent analysis configuration."""

    exit_code = 1


class DataError(WavecomoveError, ValueError):
    """Input series that violate a sampling or value precondition."""

    exit_code = 2


class GridMismatchError(WavecomoveError, ValueError):
    """Two wavelet fields that do not share scales, length or sampling."""

    exit_code = 3


class NumericError(WavecomoveError, ArithmeticError):
    exit_code = 3
