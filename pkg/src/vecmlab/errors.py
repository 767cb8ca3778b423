"""Exception hierarchy; each class maps to a CLI exit status."""


class VecmLabError(Exception):
    exit_code = 1


class ConfigError(VecmLabError, ValueError):
    exit_code = 2


class DataError(VecmLabError, ValueError):
    exit_code = 3


class NumericalError(VecmLabError, ArithmeticError):
    exit_code = 4


class DiagnosticsFailure(VecmLabError):
    exit_code = 5
