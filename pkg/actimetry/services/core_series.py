"""Core series operations: ENMO derivation, missing-day exclusion,
offset subsampling, day/night partitioning and daily profiles.
"""

import math
from datetime import datetime, timedelta

import numpy as np
import structlog

from actimetry.core.exceptions import EmptyDataError, InputValidationError, InvalidParameterError
from actimetry.models.recording import Provenance, Recording
from actimetry.models.series import SECONDS_PER_DAY, DailyProfile, DayNightSchedule, EnmoSeries

logger = structlog.get_logger(__name__)

# Tolerance when mapping float sample times onto calendar days
_DAY_EPSILON = 1e-6


# ========== ENMO ==========


def compute_enmo(x: float, y: float, z: float) -> float:
    """Euclidean norm minus one, clamped at zero.

    Args:
        x: Acceleration along the first axis (g)
        y: Acceleration along the second axis (g)
        z: Acceleration along the third axis (g)

    Returns:
        max(sqrt(x^2 + y^2 + z^2) - 1, 0) in g

    Raises:
        InputValidationError: If any component is non-finite or negative
    """
    for value in (x, y, z):
        if not math.isfinite(value) or value < 0:
            raise InputValidationError(f"Triaxial components must be finite and nonnegative, got {value!r}")
    return max(math.sqrt(x * x + y * y + z * z) - 1.0, 0.0)


def enmo_from_triaxial(samples: np.ndarray) -> np.ndarray:
    """Vectorised ``compute_enmo`` over an (N, 3) array; NaN rows stay NaN."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3:
        raise InputValidationError("triaxial samples must have shape (N, 3)")
    observed = ~np.isnan(samples).any(axis=1)
    valid = samples[observed]
    if not np.all(np.isfinite(valid)) or np.any(valid < 0):
        raise InputValidationError("Triaxial components must be finite and nonnegative")
    enmo = np.full(samples.shape[0], np.nan)
    enmo[observed] = np.maximum(np.linalg.norm(valid, axis=1) - 1.0, 0.0)
    return enmo


# ========== Missing data ==========


def _seconds_after_midnight(moment: datetime) -> float:
    return moment.hour * 3600 + moment.minute * 60 + moment.second + moment.microsecond / 1e6


def exclude_missing_days(recording: Recording) -> Recording:
    """Keep only complete local calendar days that contain no gap.

    A day is complete when the recording covers it from midnight to
    midnight. Surviving days are concatenated in order; the positions where
    non-consecutive days meet are recorded as splices.

    Every kept day holds the same number of samples at the same clock
    times, so the clock stays aligned across splices; this needs a sample
    interval that divides 24 h.

    Raises:
        InvalidParameterError: If the sample interval does not divide 24 h
        EmptyDataError: If no complete gap-free day remains
    """
    start = recording.start_time
    dt = recording.sample_interval
    samples_per_day = SECONDS_PER_DAY / dt
    if abs(samples_per_day - round(samples_per_day)) > 1e-9 * samples_per_day:
        raise InvalidParameterError(
            f"{recording.subject_id}: sample_interval {dt:g} s does not divide 86400 s; "
            "clock times would drift across excluded days"
        )
    start_s = _seconds_after_midnight(start)
    offsets = start_s + np.arange(recording.n) * dt
    day_index = np.floor(offsets / SECONDS_PER_DAY + _DAY_EPSILON).astype(np.int64)

    first_complete = math.ceil(start_s / SECONDS_PER_DAY - _DAY_EPSILON)
    end_exclusive = math.floor((start_s + recording.n * dt) / SECONDS_PER_DAY + _DAY_EPSILON)
    candidates = range(first_complete, end_exclusive)

    touched = set(np.unique(day_index[recording.missing_mask()]).tolist())
    kept = [day for day in candidates if day not in touched]

    all_days = np.unique(day_index).tolist()
    dropped = [day for day in all_days if day not in kept]

    if not kept:
        logger.warning("no_complete_days", subject_id=recording.subject_id, dropped=len(dropped))
        raise EmptyDataError(f"{recording.subject_id}: no complete calendar day without missing data")

    keep_mask = np.isin(day_index, kept)
    per_day_counts = [int(np.count_nonzero(day_index == day)) for day in kept]

    splices: list[int] = []
    position = 0
    for previous, day, count in zip([None, *kept[:-1]], kept, per_day_counts):
        if previous is not None and day != previous + 1:
            splices.append(position)
        position += count

    warnings = list(recording.provenance.warnings)
    if dropped:
        warnings.append(f"dropped {len(dropped)} incomplete or gapped day(s)")
    if splices:
        warnings.append(f"{len(splices)} splice(s) between non-consecutive days")

    logger.info(
        "excluded_missing_days",
        subject_id=recording.subject_id,
        retained=len(kept),
        dropped=len(dropped),
        splices=len(splices),
    )

    return Recording(
        subject_id=recording.subject_id,
        group=recording.group,
        start_time=start + timedelta(seconds=float(np.flatnonzero(keep_mask)[0]) * dt),
        sample_interval=dt,
        samples=recording.samples[keep_mask],
        gaps=(),
        provenance=Provenance(
            source=recording.provenance.source,
            retained_days=tuple(start.date() + timedelta(days=day) for day in kept),
            dropped_days=tuple(start.date() + timedelta(days=day) for day in dropped),
            splices=tuple(splices),
            warnings=tuple(warnings),
        ),
    )


# ========== Subsampling ==========


def subsample(series: EnmoSeries, delta: int, offset: int = 1) -> EnmoSeries:
    """Every ``delta``-th sample starting at the 1-based ``offset``.

    Returns the M = floor(N / delta) values X[(k-1)*delta + offset], k = 1..M,
    with the sampling interval scaled by ``delta``.
    """
    delta = int(delta)
    offset = int(offset)
    if not 1 <= delta <= series.n:
        raise InvalidParameterError(f"delta must lie in [1, N={series.n}], got {delta}")
    if not 1 <= offset <= delta:
        raise InvalidParameterError(f"offset must lie in [1, delta={delta}], got {offset}")

    m = series.n // delta
    first = offset - 1
    indices = first + delta * np.arange(m)

    splices = sorted(
        {
            math.ceil((splice - first) / delta)
            for splice in series.splices
            if 0 < math.ceil((splice - first) / delta) < m
        }
    )
    time_of_day = None if series.time_of_day is None else series.time_of_day[indices]
    return EnmoSeries(
        values=series.values[indices],
        start_time=series.start_time + timedelta(seconds=first * series.sample_interval),
        sample_interval=series.sample_interval * delta,
        splices=tuple(splices),
        time_of_day=time_of_day,
    )


# ========== Day / night ==========


def _partition(series: EnmoSeries, mask: np.ndarray, seconds_of_day: np.ndarray) -> EnmoSeries:
    indices = np.flatnonzero(mask)
    jumps = set((np.flatnonzero(np.diff(indices) > 1) + 1).tolist())
    # An original splice lands inside the partition wherever its index is kept
    jumps.update(int(np.searchsorted(indices, s)) for s in series.splices)
    splices = tuple(sorted(p for p in jumps if 0 < p < indices.size))
    start_time = series.start_time
    if indices.size:
        start_time = series.start_time + timedelta(seconds=float(indices[0]) * series.sample_interval)
    return EnmoSeries(
        values=series.values[indices],
        start_time=start_time,
        sample_interval=series.sample_interval,
        splices=splices,
        time_of_day=seconds_of_day[indices],
    )


def split_day_night(
    series: EnmoSeries,
    schedule: DayNightSchedule | None = None,
) -> tuple[EnmoSeries, EnmoSeries]:
    """Partition samples by clock time into (daytime, nighttime) series.

    Night is the half-open interval [night_start, night_end) wrapping past
    midnight; everything else is day. Each partition concatenates its
    samples in order and records where non-adjacent stretches meet.
    """
    schedule = schedule or DayNightSchedule()
    seconds_of_day = series.seconds_of_day()
    night_mask = schedule.is_night(seconds_of_day)

    day = _partition(series, ~night_mask, seconds_of_day)
    night = _partition(series, night_mask, seconds_of_day)
    for label, part in (("day", day), ("night", night)):
        if part.n == 0:
            logger.warning("empty_partition", partition=label, n_samples=series.n)
    return day, night


# ========== Daily profile ==========


def daily_profile(series: EnmoSeries, bin_width: int = 3600) -> DailyProfile:
    """Mean ENMO per time-of-day bin, pooled across days.

    Args:
        series: ENMO series with a wall-clock anchor
        bin_width: Bin width in seconds; must divide 86400

    Returns:
        DailyProfile with NaN means for bins that received no sample
    """
    if bin_width <= 0 or int(bin_width) != bin_width or SECONDS_PER_DAY % int(bin_width):
        raise InvalidParameterError(f"bin_width must be a positive divisor of 86400, got {bin_width}")
    if series.n == 0:
        raise EmptyDataError("cannot build a daily profile from an empty series")

    bin_width = int(bin_width)
    n_bins = SECONDS_PER_DAY // bin_width
    bins = np.floor(series.seconds_of_day() / bin_width + _DAY_EPSILON).astype(np.int64)
    bins = np.clip(bins, 0, n_bins - 1)

    counts = np.bincount(bins, minlength=n_bins)
    sums = np.bincount(bins, weights=series.values, minlength=n_bins)
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return DailyProfile(bin_width=bin_width, means=means, counts=counts)


def average_profiles(profiles: list[DailyProfile]) -> DailyProfile:
    """Average several profiles bin by bin, ignoring empty bins."""
    if not profiles:
        raise EmptyDataError("no profiles to average")
    widths = {profile.bin_width for profile in profiles}
    if len(widths) != 1:
        raise InvalidParameterError("profiles must share one bin width")
    stacked = np.vstack([profile.means for profile in profiles])
    counts = np.sum(~np.isnan(stacked), axis=0)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, np.nansum(stacked, axis=0) / np.maximum(counts, 1), np.nan)
    return DailyProfile(bin_width=widths.pop(), means=means, counts=counts)
