"""Interdaily stability and intradaily variability.

IV is computed on every offset of a subsampled series and averaged, so no
sample is discarded by subsampling (only a tail shorter than delta).
"""

from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import structlog

from actimetry.core.exceptions import (
    ActimetryError,
    DegenerateSeriesError,
    DurationError,
    EmptyDataError,
    InvalidParameterError,
)
from actimetry.models.circadian import IsResult, IvResult, IvSweep
from actimetry.models.series import SECONDS_PER_DAY, EnmoSeries
from actimetry.services.core_series import daily_profile

logger = structlog.get_logger(__name__)

# 5 minutes at 5 s sampling
DEFAULT_IV_DELTA = 60
# 5 s to 60 min at 5 s sampling
DEFAULT_SWEEP_DELTAS = tuple(range(1, 721))


def _require_variance(series: EnmoSeries) -> float:
    if series.n < 2 or np.ptp(series.values) == 0:
        raise DegenerateSeriesError("series is constant; variance is zero")
    return series.population_variance


def interdaily_stability(series: EnmoSeries, bin_width: int = 3600) -> IsResult:
    """Variance of clock-hour means relative to total variance.

    Samples are pooled by local clock hour across all days. ``bin_width``
    other than one hour is experimental.

    Raises:
        DurationError: If the series spans less than one day
        DegenerateSeriesError: If the series is constant
        EmptyDataError: If a time-of-day bin holds no sample
    """
    if series.duration_seconds < SECONDS_PER_DAY - 1e-6:
        raise DurationError(f"IS needs at least one day of data, got {series.duration_seconds / 3600:.2f} h")
    variance = _require_variance(series)

    profile = daily_profile(series, bin_width)
    if profile.empty_bins:
        first = profile.empty_bins[0]
        raise EmptyDataError(f"time-of-day bin {first} ({first * bin_width // 60} min) holds no sample")

    overall = series.mean
    numerator = float(np.mean((profile.means - overall) ** 2))
    return IsResult(
        is_value=numerator / variance,
        hourly_means=profile.means,
        overall_mean=overall,
        n_samples=series.n,
        bin_width=profile.bin_width,
    )


def intradaily_variability(series: EnmoSeries, delta: int = DEFAULT_IV_DELTA) -> IvResult:
    """Mean IV over the ``delta`` offset subseries.

    Column j of the (M, delta) block is the subseries for offset j + 1.
    Offsets whose subseries is constant are excluded from the mean.

    Raises:
        InvalidParameterError: If M = floor(N / delta) < 2
        DegenerateSeriesError: If every offset subseries is constant
    """
    delta = int(delta)
    if delta < 1:
        raise InvalidParameterError(f"delta must be a positive integer, got {delta}")
    m = series.n // delta
    if m < 2:
        raise InvalidParameterError(f"delta={delta} leaves M={m} points; at least 2 are needed")

    block = series.values[: m * delta].reshape(m, delta)
    numerator = np.sum(np.diff(block, axis=0) ** 2, axis=0) / (m - 1)
    variance = block.var(axis=0)
    degenerate = np.ptp(block, axis=0) == 0

    if np.all(degenerate):
        raise DegenerateSeriesError(f"every offset subseries is constant at delta={delta}")

    per_offset = np.full(delta, np.nan)
    per_offset[~degenerate] = numerator[~degenerate] / variance[~degenerate]
    n_degenerate = int(np.count_nonzero(degenerate))
    if n_degenerate:
        logger.debug("degenerate_offsets", delta=delta, count=n_degenerate)

    return IvResult(
        delta=delta,
        per_offset=per_offset,
        iv_value=float(np.nanmean(per_offset)),
        m=m,
        degenerate_offsets=n_degenerate,
    )


def iv_sweep(
    series: EnmoSeries,
    deltas: Iterable[int] | None = None,
    workers: int = 1,
) -> IvSweep:
    """IV over a grid of subsampling factors.

    Deltas that fail (too few points, all offsets constant) are omitted
    and reported in ``IvSweep.omitted`` instead of failing the sweep.
    """
    grid = sorted({int(d) for d in (DEFAULT_SWEEP_DELTAS if deltas is None else deltas)})
    if not grid or grid[0] < 1:
        raise InvalidParameterError("sweep deltas must be positive integers")

    def evaluate(delta: int) -> float | str:
        try:
            return intradaily_variability(series, delta).iv_value
        except ActimetryError as exc:
            return str(exc)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, grid))
    else:
        outcomes = [evaluate(delta) for delta in grid]

    kept = [(d, v) for d, v in zip(grid, outcomes) if not isinstance(v, str)]
    omitted = {d: v for d, v in zip(grid, outcomes) if isinstance(v, str)}
    if omitted:
        logger.info("sweep_omissions", count=len(omitted), first=min(omitted))

    return IvSweep(
        deltas=np.array([d for d, _ in kept], dtype=np.int64),
        iv_values=np.array([v for _, v in kept], dtype=float),
        sample_interval=series.sample_interval,
        omitted=omitted,
    )
