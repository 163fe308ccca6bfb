"""Exception hierarchy.

The three branches map onto the CLI exit-code taxonomy: DataError -> 2,
EstimationError -> 3, ConfigError -> 4.
"""


class PriorLiftError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PriorLiftError):
    """Problems with input data (files, schemas, empty selections)."""


class CsvParseError(DataError):
    """A cell could not be parsed; carries 1-based row and column name."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(DataError):
    """Column layout does not match the declared schema."""


class InvalidDatasetError(DataError):
    """Dataset violates a structural invariant (e.g. zero labeled rows)."""


class EmptyRegionError(DataError):
    """A feature region contains no (labeled) observations."""


class CoverageError(DataError):
    """A distinct feature value appears only among unlabeled rows."""


class EstimationError(PriorLiftError):
    """Problems arising while fitting or evaluating estimators."""


class ConvergenceError(EstimationError):
    """Fit did not converge; carries the per-iteration trace."""

    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = tuple(trace)


class SingularDesignError(EstimationError):
    """Design matrix of the labeled rows is rank deficient."""


class SingularInformationError(EstimationError):
    """Estimated information matrix is not positive definite."""


class DegenerateClassError(EstimationError):
    """A class is constant over the labeled rows, so no model can be fit."""


class DegeneratePriorError(EstimationError):
    """Estimated prior is exactly 0 or 1, so a ratio diagnostic is undefined."""


class ConfigError(PriorLiftError):
    """Invalid run configuration (flags, grids, ranges, alphas)."""


class ShapeError(PriorLiftError, ValueError):
    """Dimension mismatch between a feature vector and a coefficient vector."""
