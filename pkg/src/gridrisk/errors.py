"""Exception hierarchy for the gridrisk package.

Every error raised on a declared failure path derives from GridRiskError,
grouped so the CLI can map classes onto exit codes (config=2, data=3,
numerical=4).
"""


class GridRiskError(Exception):
    """Base class for all gridrisk errors."""


class DataError(GridRiskError):
    """Input data violates a documented precondition."""


class NumericalError(GridRiskError):
    """Estimation or numerical routine cannot produce a valid result."""


# -- data-shape and ingestion errors -----------------------------------------

class AlignmentError(DataError):
    """Series cannot be aligned onto a common index (e.g. empty overlap)."""


class DuplicateIdError(DataError):
    """Two series with the same id joined one collection."""


class GapError(DataError):
    """Missing values encountered under a no-gap join policy."""


class BaselineError(DataError):
    """Climatology baseline violates the declared span requirements."""


class CoverageError(DataError):
    """A grouping (calendar month, strike range, ...) has too few observations."""


class FrequencyError(DataError):
    """Series frequency does not match what the operation requires."""


class DegenerateSeriesError(DataError):
    """A series has no usable variation (constant, zero variance)."""


class DomainError(DataError):
    """A value lies outside the mathematical domain of the operation."""


class ConsistencyError(DataError):
    """Two inputs that must agree (ids, customer counts) do not."""


class ParseError(DataError):
    """A file could not be parsed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# -- estimation and network errors --------------------------------------------

class SingularDesignError(NumericalError):
    """The lagged regressor Gram matrix is singular or numerically rank deficient."""


class SampleSizeError(NumericalError):
    """Too few observations for the requested model order."""


class DegenerateInferenceError(NumericalError):
    """A coefficient standard error is zero; t-tests are undefined."""


class EmptyNetworkError(NumericalError):
    """The significance-filtered network has no edges."""


class ConvergenceError(NumericalError):
    """An iterative solver failed to converge within its iteration budget."""


# -- pipeline and I/O errors ---------------------------------------------------

class ConfigError(GridRiskError):
    """Pipeline configuration is invalid; raised before any computation."""


class IoError(GridRiskError):
    """A file could not be written."""


class PipelineError(GridRiskError):
    """Wraps a stage failure with the stage name and, when known, the series id."""

    def __init__(self, stage, cause, series=None):
        detail = f"stage '{stage}'"
        if series:
            detail += f", series '{series}'"
        super().__init__(f"{detail}: {cause}")
        self.stage = stage
        self.series = series
        self.cause = cause
