"""Exception hierarchy shared by every analysis stage.

The pipeline and the HTTP layer catch ``ActimetryError`` to isolate one
recording's failure from the rest of a cohort.
"""


class ActimetryError(Exception):
    """Base class for all analysis errors."""


class InputValidationError(ActimetryError, ValueError):
    """Raw input values or files are malformed (non-finite, negative, unparsable)."""


class InvalidParameterError(ActimetryError, ValueError):
    """A tuning parameter is outside its admissible range."""


class ConfigError(InvalidParameterError):
    """Unknown key or unparsable value in a run configuration."""


class RecipeError(InvalidParameterError):
    """Synthetic cohort recipe is not valid."""


class EmptyDataError(ActimetryError):
    """No usable data remains (e.g. every calendar day touched by a gap)."""


class DegenerateSeriesError(ActimetryError):
    """The series has zero variance, so a variance-normalised statistic is undefined."""


class DurationError(ActimetryError):
    """The series is too short for the requested statistic."""


class DegenerateFluctuationError(ActimetryError):
    """A DFA fluctuation F(S) is zero, so its logarithm is undefined."""

    def __init__(self, scale: int):
        self.scale = scale
        super().__init__(f"Fluctuation F(S) is zero at scale S={scale}")


class InsufficientScalesError(ActimetryError):
    """Fewer than three usable scales for the log-log regression."""


class BandResolutionError(ActimetryError):
    """A harmonic band holds no spectral grid point; the padding rule was violated."""


class PartitionError(ActimetryError):
    """Wraps an error raised while analysing the day or night partition."""

    def __init__(self, partition: str, cause: Exception):
        self.partition = partition
        self.cause = cause
        super().__init__(f"{partition}: {cause}")


class UploadTooLargeError(InputValidationError):
    """An uploaded recording holds more rows than the service accepts."""
