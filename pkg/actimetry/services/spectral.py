"""Periodogram, circadian band power (PoV) and the cosinor baseline.

Frequencies are handled in cycles per sample internally and reported in
Hz. Ordinates are densities in g^2 s, scaled so that the integral over the
full two-sided grid equals the population variance exactly:

    I(f_m) = dt / N * |sum_t (X_t - mean) exp(-2 pi i m t / L)|^2,  df = 1 / (L dt)

where L = N * zero_pad_factor.
"""

import math

import numpy as np
import structlog
from scipy import integrate, signal

from actimetry.core.exceptions import (
    BandResolutionError,
    DegenerateSeriesError,
    DurationError,
    InvalidParameterError,
)
from actimetry.models.series import SECONDS_PER_DAY, EnmoSeries
from actimetry.models.spectral import (
    BAND_HIGH_PERIOD_S,
    BAND_LOW_PERIOD_S,
    CosinorFit,
    HarmonicBand,
    PovResult,
    SpectralEstimate,
)

logger = structlog.get_logger(__name__)

MIN_SAMPLES = 16
# Grid spacing must resolve the fundamental band into at least this many intervals
BAND_SUBDIVISIONS = 16
POV_METHODS = ("fourier", "trapezoid")
BAND_METHODS = POV_METHODS


def _centred(series: EnmoSeries) -> np.ndarray:
    if series.n < MIN_SAMPLES:
        raise DurationError(f"periodogram needs at least {MIN_SAMPLES} samples, got {series.n}")
    if np.ptp(series.values) == 0:
        raise DegenerateSeriesError("series is constant; periodogram is identically zero")
    return series.values - series.mean


# ========== Periodogram ==========


def periodogram(
    series: EnmoSeries,
    zero_pad_factor: int = 1,
    window: tuple[float, float] | None = None,
) -> SpectralEstimate:
    """Raw (untapered, unsmoothed) periodogram on a zero-padded grid.

    Args:
        series: ENMO series, N >= 16
        zero_pad_factor: Grid refinement; the transform length is N * factor
        window: Optional (f_min, f_max) in Hz. Only grid points inside the
            window are evaluated (chirp-z transform) and the estimate is
            marked incomplete.

    Returns:
        SpectralEstimate over (0, f_n] or over the window
    """
    if int(zero_pad_factor) != zero_pad_factor or zero_pad_factor < 1:
        raise InvalidParameterError(f"zero_pad_factor must be a positive integer, got {zero_pad_factor}")
    zero_pad_factor = int(zero_pad_factor)
    centred = _centred(series)
    n = series.n
    dt = series.sample_interval
    length = n * zero_pad_factor
    spacing = 1.0 / (length * dt)
    scale = dt / n
    variance = series.population_variance

    if window is None:
        transform = np.fft.rfft(centred, n=length)
        power = scale * np.abs(transform) ** 2
        return SpectralEstimate(
            frequencies=np.arange(1, power.size) * spacing,
            ordinates=power[1:],
            grid_spacing=spacing,
            zero_pad_factor=zero_pad_factor,
            total_population_variance=variance,
            n_samples=n,
            sample_interval=dt,
            complete=True,
            zero_ordinate=float(power[0]),
        )

    f_min, f_max = window
    first = max(math.ceil(f_min / spacing - 1e-9), 1)
    last = min(math.floor(f_max / spacing + 1e-9), length // 2)
    if last < first:
        raise BandResolutionError(f"window [{f_min:.3e}, {f_max:.3e}] Hz holds no grid point")
    count = last - first + 1
    # zoom_fft needs two distinct edges; evaluate one extra point when the window holds one
    upper = last if count > 1 else last + 1
    points = upper - first + 1
    transform = signal.zoom_fft(
        centred,
        [first / length, upper / length],
        m=points,
        fs=1.0,
        endpoint=True,
    )[:count]
    return SpectralEstimate(
        frequencies=np.arange(first, last + 1) * spacing,
        ordinates=scale * np.abs(transform) ** 2,
        grid_spacing=spacing,
        zero_pad_factor=zero_pad_factor,
        total_population_variance=variance,
        n_samples=n,
        sample_interval=dt,
        complete=False,
    )


def required_zero_pad(series: EnmoSeries, band: HarmonicBand | None = None) -> int:
    """Smallest factor giving grid spacing <= band width / 16."""
    band = band or HarmonicBand.for_harmonic(1)
    return max(1, math.ceil(BAND_SUBDIVISIONS / (band.width * series.duration_seconds) - 1e-9))


# ========== Band power ==========


def band_power(estimate: SpectralEstimate, band: HarmonicBand, method: str = "trapezoid") -> float:
    """One-sided integral of the periodogram over ``band`` (g^2).

    ``trapezoid`` integrates the gridded ordinates with linear
    interpolation to the exact band edges. ``fourier`` sums the ordinates
    that fall on the unpadded Fourier grid inside the closed band, each
    weighted by the Fourier spacing 1 / (N dt).

    Raises:
        BandResolutionError: If no grid point falls inside the band
    """
    if method not in BAND_METHODS:
        raise InvalidParameterError(f"method must be one of {BAND_METHODS}")
    if band.f_hi > estimate.nyquist * (1 + 1e-12):
        raise InvalidParameterError(f"band k={band.k} extends above the Nyquist frequency")

    freqs = estimate.frequencies
    inside = (freqs >= band.f_lo) & (freqs <= band.f_hi)

    if method == "fourier":
        inside &= estimate.grid_indices() % estimate.zero_pad_factor == 0
        if not np.any(inside):
            raise BandResolutionError(f"band k={band.k} holds no Fourier frequency")
        return float(np.sum(estimate.ordinates[inside]) * estimate.fourier_spacing)

    if not np.any(inside):
        raise BandResolutionError(
            f"band k={band.k} holds no grid point at spacing {estimate.grid_spacing:.3e} Hz"
        )
    edges = np.interp([band.f_lo, band.f_hi], freqs, estimate.ordinates)
    xs = np.concatenate([[band.f_lo], freqs[inside], [band.f_hi]])
    ys = np.concatenate([[edges[0]], estimate.ordinates[inside], [edges[1]]])
    return float(integrate.trapezoid(ys, xs))


def harmonic_bands(
    k_max: int,
    low_period_s: float = BAND_LOW_PERIOD_S,
    high_period_s: float = BAND_HIGH_PERIOD_S,
) -> list[HarmonicBand]:
    """Bands 1..k_max; raises if any two of them overlap."""
    if k_max < 1:
        raise InvalidParameterError(f"k_max must be >= 1, got {k_max}")
    bands = [HarmonicBand.for_harmonic(k, low_period_s, high_period_s) for k in range(1, k_max + 1)]
    for lower, upper in zip(bands, bands[1:]):
        if lower.overlaps(upper):
            raise InvalidParameterError(f"harmonic bands {lower.k} and {upper.k} overlap")
    return bands


# ========== PoV ==========


def _trapezoid_band_power(series: EnmoSeries, band: HarmonicBand, padding: int) -> float:
    spacing = 1.0 / (series.duration_seconds * padding)
    local = periodogram(series, padding, window=(band.f_lo - spacing, band.f_hi + spacing))
    return band_power(local, band, "trapezoid")


def pov(
    series: EnmoSeries,
    k_max: int = 4,
    method: str = "fourier",
    zero_pad_factor: int | None = None,
    low_period_s: float = BAND_LOW_PERIOD_S,
    high_period_s: float = BAND_HIGH_PERIOD_S,
) -> PovResult:
    """Proportion of variance in the circadian fundamental and harmonic bands.

    PoV(F) = 2 * P_1 / var and PoV(H) = 2 * sum_k P_k / var, with P_k the
    one-sided band power and var the population variance.

    Args:
        series: ENMO series spanning at least two days
        k_max: Number of harmonic bands
        method: ``fourier`` (default) or ``trapezoid`` (zero-padded).
            Under ``fourier`` a band holding no Fourier frequency is
            integrated with ``trapezoid`` instead.
        zero_pad_factor: Padding for ``trapezoid``; defaults to the
            smallest factor resolving the fundamental band into 16 steps
    """
    if method not in POV_METHODS:
        raise InvalidParameterError(f"method must be one of {POV_METHODS}")
    if series.duration_seconds < 2 * SECONDS_PER_DAY - 1e-6:
        raise DurationError(f"PoV needs at least two days, got {series.duration_seconds / 86400:.2f}")
    bands = harmonic_bands(k_max, low_period_s, high_period_s)
    nyquist = 1.0 / (2.0 * series.sample_interval)
    if bands[-1].f_hi > nyquist:
        raise InvalidParameterError(f"k_max={k_max} places a band above the Nyquist frequency")
    _centred(series)
    variance = series.population_variance

    trapezoid_bands: list[int] = []
    if method == "fourier":
        padding = 1
        estimate = periodogram(series, padding)
        powers = []
        for band in bands:
            try:
                powers.append(band_power(estimate, band, "fourier"))
            except BandResolutionError:
                # Span is not a whole number of days: no Fourier frequency in the band
                padding = zero_pad_factor or required_zero_pad(series, bands[0])
                powers.append(_trapezoid_band_power(series, band, padding))
                trapezoid_bands.append(band.k)
        if trapezoid_bands:
            logger.info("pov_trapezoid_fallback", bands=trapezoid_bands, padding=padding)
    else:
        padding = zero_pad_factor or required_zero_pad(series, bands[0])
        powers = [_trapezoid_band_power(series, band, padding) for band in bands]

    per_band = tuple(p / variance for p in powers)
    result = PovResult(
        pov_fundamental=2.0 * per_band[0],
        pov_harmonic=2.0 * sum(per_band),
        per_band=per_band,
        k_max=k_max,
        method=method,
        zero_pad_factor=padding,
        trapezoid_bands=tuple(trapezoid_bands),
    )
    logger.debug("pov", method=method, padding=padding, pov_f=result.pov_fundamental, pov_h=result.pov_harmonic)
    return result


# ========== Cosinor ==========


def cosinor(series: EnmoSeries, period_hours: float = 24.0) -> CosinorFit:
    """Least-squares cosinor via its linear form M + b_c cos(wt) + b_s sin(wt).

    Time t is measured from the first sample. Amplitude is hypot(b_c, b_s)
    and the acrophase phi solves b_c = A cos(phi), b_s = -A sin(phi),
    reported in [0, 2 pi).
    """
    if series.duration_seconds < SECONDS_PER_DAY - 1e-6:
        raise DurationError(f"cosinor needs at least one day, got {series.duration_seconds / 3600:.2f} h")
    if np.ptp(series.values) == 0:
        raise DegenerateSeriesError("series is constant; R^2 is undefined")

    omega = 2.0 * np.pi / (period_hours * 3600.0)
    phase = omega * np.arange(series.n) * series.sample_interval
    design = np.column_stack([np.ones(series.n), np.cos(phase), np.sin(phase)])
    coefficients, *_ = np.linalg.lstsq(design, series.values, rcond=None)
    mesor, beta_cos, beta_sin = (float(c) for c in coefficients)

    fitted = design @ coefficients
    acrophase = float(np.mod(np.arctan2(-beta_sin, beta_cos), 2.0 * np.pi))
    if acrophase >= 2.0 * np.pi:
        acrophase = 0.0
    residual = float(np.sum((series.values - fitted) ** 2))
    total = float(np.sum((series.values - series.mean) ** 2))

    return CosinorFit(
        mesor=mesor,
        amplitude=float(np.hypot(beta_cos, beta_sin)),
        acrophase=acrophase,
        r_squared=float(np.clip(1.0 - residual / total, 0.0, 1.0)),
        period_hours=period_hours,
    )
