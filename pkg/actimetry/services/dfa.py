"""Detrended fluctuation analysis (first order, non-overlapping windows)."""

import numpy as np
import structlog
from scipy import stats

from actimetry.core.exceptions import (
    ActimetryError,
    DegenerateFluctuationError,
    InsufficientScalesError,
    InvalidParameterError,
    PartitionError,
)
from actimetry.models.dfa import DfaConfig, DfaFit
from actimetry.models.series import DayNightSchedule, EnmoSeries
from actimetry.services.core_series import split_day_night

logger = structlog.get_logger(__name__)

MIN_SCALES = 3
PROFILE_SOURCES = ("partition", "full")


def dfa_profile(series: EnmoSeries) -> np.ndarray:
    """Mean-centred cumulative sum Z_t = sum_{u<=t} (X_u - mean)."""
    if series.n < 2:
        raise InvalidParameterError(f"DFA profile needs N >= 2, got {series.n}")
    return np.cumsum(series.values - series.mean)


def fluctuation(profile: np.ndarray, scale: int) -> float:
    """RMS of the per-segment RMS deviation from a least-squares line.

    The first ``scale * floor(N / scale)`` points are cut into
    non-overlapping segments; the shorter tail is discarded.
    """
    profile = np.asarray(profile, dtype=float)
    scale = int(scale)
    if not 2 <= scale <= profile.size:
        raise InvalidParameterError(f"scale must lie in [2, N={profile.size}], got {scale}")

    n_segments = profile.size // scale
    segments = profile[: n_segments * scale].reshape(n_segments, scale)
    x = np.arange(scale) - (scale - 1) / 2.0
    slopes = segments @ x / np.dot(x, x)
    residuals = segments - segments.mean(axis=1, keepdims=True) - slopes[:, None] * x
    rmsd_squared = np.mean(residuals**2, axis=1)
    return float(np.sqrt(np.mean(rmsd_squared)))


def _fit_profile(
    profile: np.ndarray,
    config: DfaConfig,
    splices: int = 0,
) -> DfaFit:
    n = profile.size
    usable = [s for s in config.scales if s <= n // 2]
    warnings: list[str] = []
    if len(usable) < len(config.scales):
        dropped = [s for s in config.scales if s > n // 2]
        warnings.append(f"scales {dropped} exceed N/2 and were skipped")
        logger.info("dfa_scales_skipped", n_samples=n, skipped=dropped)
    if len(usable) < MIN_SCALES:
        raise InsufficientScalesError(
            f"only {len(usable)} scale(s) fit in N={n} samples; at least {MIN_SCALES} are needed"
        )

    fluctuations = np.array([fluctuation(profile, s) for s in usable])
    floor = 1e-12 * max(float(np.max(np.abs(profile))), 1.0)
    for scale, value in zip(usable, fluctuations):
        if not value > floor:
            raise DegenerateFluctuationError(scale)

    regression = stats.linregress(np.log2(usable), np.log2(fluctuations))
    if splices:
        warnings.append(f"profile spans {splices} splice(s)")

    return DfaFit(
        scales=np.array(usable),
        fluctuations=fluctuations,
        alpha=float(regression.slope),
        intercept=float(regression.intercept),
        r_squared=float(np.clip(regression.rvalue**2, 0.0, 1.0)),
        n_samples=n,
        splices=splices,
        warnings=tuple(warnings),
    )


def dfa_alpha(series: EnmoSeries, config: DfaConfig | None = None) -> DfaFit:
    """Scaling exponent as the slope of log2 F(S) against log2 S.

    Scales above N/2 are skipped; the fit is unweighted OLS over the rest.

    Raises:
        DegenerateFluctuationError: If some F(S) is zero
        InsufficientScalesError: If fewer than three scales remain
    """
    config = config or DfaConfig()
    return _fit_profile(dfa_profile(series), config, splices=len(series.splices))


def dfa_day_night(
    series: EnmoSeries,
    schedule: DayNightSchedule | None = None,
    config: DfaConfig | None = None,
    profile_source: str = "partition",
) -> tuple[DfaFit, DfaFit]:
    """Separate (daytime, nighttime) DFA fits.

    With ``profile_source="partition"`` each partition gets its own
    mean-centred profile; ``"full"`` slices the profile of the whole series.

    Raises:
        PartitionError: Wrapping the failure of either partition
    """
    if profile_source not in PROFILE_SOURCES:
        raise InvalidParameterError(f"profile_source must be one of {PROFILE_SOURCES}")
    schedule = schedule or DayNightSchedule()
    config = config or DfaConfig()

    day, night = split_day_night(series, schedule)
    if profile_source == "full" and series.n >= 2:
        full_profile = dfa_profile(series)
        night_mask = schedule.is_night(series.seconds_of_day())
        profiles = {"day": full_profile[~night_mask], "night": full_profile[night_mask]}
    else:
        profiles = {}

    fits: dict[str, DfaFit] = {}
    for label, part in (("day", day), ("night", night)):
        try:
            if part.n == 0:
                raise InsufficientScalesError("partition is empty")
            profile = profiles.get(label)
            if profile is None:
                profile = dfa_profile(part)
            fits[label] = _fit_profile(profile, config, splices=len(part.splices))
        except ActimetryError as exc:
            raise PartitionError(label, exc) from exc
    return fits["day"], fits["night"]
