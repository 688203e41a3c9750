"""Spectral estimates, circadian harmonic bands and PoV/cosinor results."""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from actimetry.core.exceptions import InvalidParameterError
from actimetry.models._arrays import frozen_array

# Band edges around the k-th harmonic: periods of 24.5 h and 23.5 h
BAND_LOW_PERIOD_S = 88200.0
BAND_HIGH_PERIOD_S = 84600.0


@dataclass(frozen=True)
class SpectralEstimate:
    """Periodogram ordinates (g^2 s) on a positive-frequency grid.

    A complete estimate covers (0, f_n] on the zero-padded grid, so
    ``two_sided_integral`` reproduces the population variance. A windowed
    estimate covers only grid points inside a frequency window.
    """

    frequencies: np.ndarray
    ordinates: np.ndarray
    grid_spacing: float
    zero_pad_factor: int
    total_population_variance: float
    n_samples: int
    sample_interval: float
    complete: bool = True
    zero_ordinate: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "frequencies", frozen_array(self.frequencies))
        object.__setattr__(self, "ordinates", frozen_array(self.ordinates))
        if self.frequencies.shape != self.ordinates.shape:
            raise ValueError("frequencies and ordinates must have equal length")

    @property
    def nyquist(self) -> float:
        return 1.0 / (2.0 * self.sample_interval)

    @property
    def grid_length(self) -> int:
        """Length of the padded transform, L = N * zero_pad_factor."""
        return self.n_samples * self.zero_pad_factor

    @property
    def fourier_spacing(self) -> float:
        """Spacing of the unpadded Fourier grid, 1 / (N dt)."""
        return self.grid_spacing * self.zero_pad_factor

    def grid_indices(self) -> np.ndarray:
        """Integer position m of every stored ordinate on the padded grid f = m * spacing."""
        return np.rint(self.frequencies / self.grid_spacing).astype(np.int64)

    def two_sided_integral(self) -> float:
        """Sum of I(f) df over the full two-sided grid."""
        if not self.complete:
            raise InvalidParameterError("two-sided integral needs a complete estimate")
        weights = np.full(self.ordinates.size, 2.0)
        if self.grid_length % 2 == 0 and weights.size:
            weights[-1] = 1.0
        return float((self.zero_ordinate + np.sum(weights * self.ordinates)) * self.grid_spacing)

    def to_frame(self, f_min: float = 0.0, f_max: float | None = None) -> pd.DataFrame:
        upper = np.inf if f_max is None else f_max
        keep = (self.frequencies >= f_min) & (self.frequencies <= upper)
        ordinates = self.ordinates[keep]
        return pd.DataFrame(
            {
                "frequency_hz": self.frequencies[keep],
                "power_density": ordinates,
                "percent_variance": 100.0 * 2.0 * ordinates * self.grid_spacing / self.total_population_variance,
            }
        )


@dataclass(frozen=True)
class HarmonicBand:
    """Frequency band [k/24.5 h, k/23.5 h] around the k-th circadian harmonic."""

    k: int
    f_lo: float
    f_hi: float

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidParameterError("harmonic order k must be >= 1")
        if not 0 < self.f_lo < self.f_hi:
            raise InvalidParameterError(f"invalid band edges [{self.f_lo}, {self.f_hi}]")

    @classmethod
    def for_harmonic(
        cls,
        k: int,
        low_period_s: float = BAND_LOW_PERIOD_S,
        high_period_s: float = BAND_HIGH_PERIOD_S,
    ) -> "HarmonicBand":
        return cls(k=k, f_lo=k / low_period_s, f_hi=k / high_period_s)

    @property
    def width(self) -> float:
        return self.f_hi - self.f_lo

    def overlaps(self, other: "HarmonicBand") -> bool:
        return self.f_lo <= other.f_hi and other.f_lo <= self.f_hi


@dataclass(frozen=True)
class PovResult:
    """Share of variance in the fundamental band and in the first k_max harmonic bands.

    ``per_band`` holds one-sided band powers divided by the variance; twice
    their sum is ``pov_harmonic``. ``trapezoid_bands`` lists the harmonics
    integrated on the zero-padded grid because the Fourier grid held no
    point inside them.
    """

    pov_fundamental: float
    pov_harmonic: float
    per_band: tuple[float, ...]
    k_max: int
    method: str = "fourier"
    zero_pad_factor: int = 1
    variance_convention: str = "population"
    trapezoid_bands: tuple[int, ...] = ()


@dataclass(frozen=True)
class CosinorFit:
    """Single-component cosinor, X(t) ~ mesor + amplitude * cos(2 pi t / period + acrophase)."""

    mesor: float
    amplitude: float
    acrophase: float
    r_squared: float
    period_hours: float = 24.0
