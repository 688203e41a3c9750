from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from actimetry.models._arrays import frozen_array


@dataclass(frozen=True)
class IsResult:
    """Interdaily stability with the bin means it was computed from."""

    is_value: float
    hourly_means: np.ndarray
    overall_mean: float
    n_samples: int
    bin_width: int = 3600

    def __post_init__(self) -> None:
        object.__setattr__(self, "hourly_means", frozen_array(self.hourly_means))


@dataclass(frozen=True)
class IvResult:
    """Intradaily variability at one subsampling factor.

    ``per_offset`` holds IV for every offset j = 1..delta; offsets whose
    subseries is constant are NaN and counted in ``degenerate_offsets``.
    """

    delta: int
    per_offset: np.ndarray
    iv_value: float
    m: int
    degenerate_offsets: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_offset", frozen_array(self.per_offset))


@dataclass(frozen=True)
class IvSweep:
    """IV as a function of the subsampling factor.

    Deltas whose IV could not be computed are left out of ``deltas`` and
    listed with the reason in ``omitted``.
    """

    deltas: np.ndarray
    iv_values: np.ndarray
    sample_interval: float
    omitted: dict[int, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "deltas", frozen_array(self.deltas, dtype=np.int64))
        object.__setattr__(self, "iv_values", frozen_array(self.iv_values))
        if self.deltas.shape != self.iv_values.shape:
            raise ValueError("deltas and iv_values must have equal length")
        if np.any(np.diff(self.deltas) <= 0):
            raise ValueError("deltas must be strictly increasing")

    @property
    def interval_seconds(self) -> np.ndarray:
        return self.deltas * self.sample_interval

    def value_at(self, delta: int) -> float:
        matches = np.flatnonzero(self.deltas == delta)
        return float(self.iv_values[matches[0]]) if matches.size else float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "delta": self.deltas,
                "interval_seconds": self.interval_seconds,
                "iv": self.iv_values,
            }
        )
