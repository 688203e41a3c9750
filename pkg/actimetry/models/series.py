"""Univariate ENMO series and the time-of-day structures built on it."""

from dataclasses import dataclass, field
from datetime import datetime
from functools import cached_property

import numpy as np

from actimetry.core.exceptions import InputValidationError
from actimetry.models._arrays import frozen_array

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class EnmoSeries:
    """Nonnegative ENMO values on a uniform sampling grid.

    Sample ``t`` (zero based) is taken at ``start_time + t * sample_interval``
    between splices. Series assembled from non-adjacent stretches (day/night
    partitions) carry their own ``time_of_day`` array because that mapping no
    longer holds across a splice.
    """

    values: np.ndarray
    start_time: datetime
    sample_interval: float
    splices: tuple[int, ...] = ()
    time_of_day: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", frozen_array(self.values))
        if self.time_of_day is not None:
            object.__setattr__(self, "time_of_day", frozen_array(self.time_of_day))
            if self.time_of_day.shape != self.values.shape:
                raise InputValidationError("time_of_day must match values in length")
        if self.sample_interval <= 0:
            raise InputValidationError("sample_interval must be positive")
        if self.start_time.tzinfo is None:
            raise InputValidationError("start_time must carry a UTC offset")
        if self.values.ndim != 1:
            raise InputValidationError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise InputValidationError("ENMO values must be finite and nonnegative")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @cached_property
    def mean(self) -> float:
        return float(self.values.mean())

    @cached_property
    def population_variance(self) -> float:
        return float(self.values.var())

    @property
    def duration_seconds(self) -> float:
        return self.n * self.sample_interval

    def seconds_of_day(self) -> np.ndarray:
        """Local clock time of every sample, in seconds after midnight."""
        if self.time_of_day is not None:
            return self.time_of_day
        start = self.start_time
        offset = start.hour * 3600 + start.minute * 60 + start.second + start.microsecond / 1e6
        return np.mod(offset + np.arange(self.n) * self.sample_interval, SECONDS_PER_DAY)


@dataclass(frozen=True)
class DayNightSchedule:
    """Clock hours bounding the night; the interval wraps past midnight."""

    night_start: float = 23.0
    night_end: float = 6.0

    def __post_init__(self) -> None:
        for name in ("night_start", "night_end"):
            hour = getattr(self, name)
            if not 0 <= hour < 24:
                raise InputValidationError(f"{name} must lie in [0, 24), got {hour}")

    def is_night(self, seconds_of_day: np.ndarray) -> np.ndarray:
        """Half-open membership test: night is [night_start, night_end)."""
        hours = np.asarray(seconds_of_day, dtype=float) / 3600.0
        if self.night_start > self.night_end:
            return (hours >= self.night_start) | (hours < self.night_end)
        return (hours >= self.night_start) & (hours < self.night_end)


@dataclass(frozen=True)
class DailyProfile:
    """Mean ENMO per time-of-day bin, pooled over all days.

    Bins without samples hold NaN and are listed in ``empty_bins``.
    """

    bin_width: int
    means: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "means", frozen_array(self.means))
        object.__setattr__(self, "counts", frozen_array(self.counts, dtype=np.int64))
        if self.means.size * self.bin_width != SECONDS_PER_DAY:
            raise InputValidationError("profile must cover exactly 24 hours")

    @property
    def n_bins(self) -> int:
        return int(self.means.size)

    @property
    def empty_bins(self) -> tuple[int, ...]:
        return tuple(int(b) for b in np.flatnonzero(self.counts == 0))

    @property
    def bin_starts(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.bin_width
