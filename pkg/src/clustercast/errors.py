"""Exception taxonomy for the pipeline.

Every failure mode that callers are expected to handle gets a named class so
error handling can be precise instead of string-matching ValueError messages.
"""


class ClusterCastError(Exception):
    """Base class for all library errors."""


class LengthMismatch(ClusterCastError):
    """Paired vectors have different lengths."""


class EmptyInput(ClusterCastError):
    """An operation received an empty sequence or matrix."""


class TooShort(ClusterCastError):
    """A sequence is shorter than the operation requires."""


class OutOfRange(ClusterCastError):
    """An index or size parameter falls outside the valid range."""


class UndefinedAtZero(ClusterCastError):
    """A percentage error was requested against a zero actual value."""


class NonStationary(ClusterCastError):
    """Supplied AR coefficients have a characteristic root on or outside the unit circle."""


class DegenerateRange(ClusterCastError):
    """A constant sequence cannot be rescaled to a target range."""


class TooManyOutliers(ClusterCastError):
    """More outlier positions requested than the sequence can hold."""


class BadSpan(ClusterCastError):
    """A smoothing span or window parameter is outside its valid range."""


class AllMissing(ClusterCastError):
    """Imputation needs at least one observed value."""


class DimensionMismatch(ClusterCastError):
    """Two point sequences have different point dimensionality."""


class ZeroVariance(ClusterCastError):
    """A statistic is undefined on a constant sequence."""


class KTooLarge(ClusterCastError):
    """Requested more clusters than there are points."""


class EmptyMatrix(ClusterCastError):
    """Clustering received a matrix with no rows."""


class SingleCluster(ClusterCastError):
    """A validity index needs at least two clusters."""


class ShapeMismatch(ClusterCastError):
    """Model input shapes do not match the architecture."""


class StaticBranchMismatch(ClusterCastError):
    """Static features supplied to a model without a static branch, or omitted from one that needs them."""


class HorizonMismatch(ClusterCastError):
    """Forecast requested at an index the model was not trained for."""


class Divergence(ClusterCastError):
    """Training loss became non-finite."""


class SchemaError(ClusterCastError):
    """A dataset file does not match its declared schema."""


class ConfigError(ClusterCastError):
    """An experiment configuration is invalid."""
