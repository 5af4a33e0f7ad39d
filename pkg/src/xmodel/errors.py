"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, NumericalError -> 4.
"""


class XModelError(Exception):
    """Base class for all package errors."""


class ConfigError(XModelError):
    """Invalid configuration file, key, or parameter value."""


class DataError(XModelError):
    """Invalid, inconsistent, or insufficient input data."""


class CurveError(DataError):
    """A step curve violates its invariants."""


class NoEquilibriumError(DataError):
    """Supply never reaches demand anywhere on the price grid."""


class CsvFormatError(DataError):
    """Malformed CSV input; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class NumericalError(XModelError):
    """A numerical routine failed to produce a usable result."""


class ConvergenceError(NumericalError):
    """Coordinate descent ran out of iterations at some penalty."""

    def __init__(self, lam, iterations):
        super().__init__(
            f"coordinate descent did not converge at lambda={lam:.6g} "
            f"after {iterations} sweeps"
        )
        self.lam = lam
        self.iterations = iterations
