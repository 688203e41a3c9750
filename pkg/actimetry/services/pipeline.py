"""End-to-end metric pipeline over a set of recording files.

Recordings are analysed independently (optionally in worker processes);
the cohort report is assembled in one pass ordered by subject_id, so the
result never depends on scheduling.
"""

import time
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import TypeVar

import pandas as pd
import structlog

from actimetry.core.exceptions import ActimetryError, EmptyDataError
from actimetry.models.circadian import IvSweep
from actimetry.models.dfa import DfaFit
from actimetry.models.recording import Recording
from actimetry.models.series import SECONDS_PER_DAY, DailyProfile, EnmoSeries
from actimetry.schemas.config import RunConfig
from actimetry.schemas.metrics import CorrelationMatrix, MetricTable, RecordingFailure
from actimetry.schemas.report import MetricsReport, RecordingMetrics
from actimetry.services import group_stats
from actimetry.services.circadian import interdaily_stability, intradaily_variability, iv_sweep
from actimetry.services.core_series import average_profiles, daily_profile, exclude_missing_days
from actimetry.services.dfa import dfa_alpha, dfa_day_night
from actimetry.services.ingestion import discover_recordings, load_recording
from actimetry.services.spectral import cosinor, periodogram, pov

logger = structlog.get_logger(__name__)

# Spectrum dumps cover the circadian fundamental and its first four harmonics
SPECTRUM_MAX_HZ = 5.0 / SECONDS_PER_DAY

T = TypeVar("T")


@dataclass
class RecordingAnalysis:
    """Metrics of one recording plus the curves behind them."""

    metrics: RecordingMetrics
    sweep: IvSweep | None = None
    dfa_curves: pd.DataFrame | None = None
    spectrum: pd.DataFrame | None = None
    profile: DailyProfile | None = None


@dataclass
class RecordingOutcome:
    source: str
    analysis: RecordingAnalysis | None = None
    failure: RecordingFailure | None = None


@dataclass
class CohortResult:
    report: MetricsReport
    analyses: dict[str, RecordingAnalysis] = field(default_factory=dict)
    sweep_correlations: pd.DataFrame | None = None
    sweep_curves: pd.DataFrame | None = None
    group_profiles: dict[str, DailyProfile] = field(default_factory=dict)


# ========== Per recording ==========


def _dfa_curves(fits: dict[str, DfaFit]) -> pd.DataFrame:
    frames = [fit.to_frame().assign(partition=label) for label, fit in fits.items()]
    if not frames:
        return pd.DataFrame(columns=["partition", "log2_S", "log2_F"])
    return pd.concat(frames, ignore_index=True)[["partition", "log2_S", "log2_F"]]


def spectrum_frame(series: EnmoSeries, f_max: float = SPECTRUM_MAX_HZ) -> pd.DataFrame:
    """Unpadded periodogram from zero to ``f_max``."""
    return periodogram(series).to_frame(0.0, f_max)


def analyze_recording(
    recording: Recording,
    config: RunConfig,
    include_sweep: bool = True,
    include_curves: bool = True,
) -> RecordingAnalysis:
    """Exclude incomplete days, then compute every metric of one recording.

    A metric that fails is left empty and its error recorded; only a
    recording without a single complete day fails as a whole.

    Raises:
        EmptyDataError: If no complete gap-free day remains
    """
    started = time.perf_counter()
    cleaned = exclude_missing_days(recording)
    series = cleaned.to_series()
    provenance = cleaned.provenance
    warnings = list(provenance.warnings)
    errors: dict[str, str] = {}

    def attempt(name: str, compute: Callable[[], T]) -> T | None:
        try:
            return compute()
        except ActimetryError as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
            logger.info("metric_failed", subject_id=recording.subject_id, metric=name, error=str(exc))
            return None

    is_result = attempt("is", lambda: interdaily_stability(series))
    iv_result = attempt("iv", lambda: intradaily_variability(series, config.iv_delta))
    if iv_result is not None and iv_result.degenerate_offsets:
        warnings.append(f"IV: {iv_result.degenerate_offsets} of {config.iv_delta} offsets constant")
    sweep = attempt("iv_sweep", lambda: iv_sweep(series, config.sweep_deltas)) if include_sweep else None

    dfa_config = config.dfa_config()
    overall = attempt("alpha", lambda: dfa_alpha(series, dfa_config))
    day_night = attempt(
        "alpha_day_night",
        lambda: dfa_day_night(series, config.schedule(), dfa_config, config.dfa_profile_source),
    )
    day, night = day_night if day_night is not None else (None, None)
    fits = {label: fit for label, fit in (("overall", overall), ("day", day), ("night", night)) if fit is not None}
    for label, fit in fits.items():
        warnings.extend(f"DFA {label}: {message}" for message in fit.warnings)

    pov_result = attempt(
        "pov",
        lambda: pov(
            series,
            k_max=config.k_max,
            method=config.pov_method,
            zero_pad_factor=config.zero_pad_factor,
            low_period_s=config.band_low_period_s,
            high_period_s=config.band_high_period_s,
        ),
    )
    if pov_result is not None and pov_result.trapezoid_bands:
        warnings.append(f"PoV: bands {list(pov_result.trapezoid_bands)} integrated on the zero-padded grid")
    cosinor_fit = attempt("cosinor", lambda: cosinor(series, config.cosinor_period_hours))
    profile = attempt("profile", lambda: daily_profile(series, config.profile_bin_width))
    spectrum = attempt("spectrum", lambda: spectrum_frame(series)) if include_curves else None

    elapsed = time.perf_counter() - started
    metrics = RecordingMetrics(
        subject_id=recording.subject_id,
        group=recording.group,
        source=Path(provenance.source).name if provenance.source else recording.subject_id,
        sample_interval=series.sample_interval,
        n_samples=series.n,
        retained_days=len(provenance.retained_days),
        dropped_days=len(provenance.dropped_days),
        retained_dates=[d.isoformat() for d in provenance.retained_days],
        dropped_dates=[d.isoformat() for d in provenance.dropped_days],
        splices=len(provenance.splices),
        is_value=is_result.is_value if is_result else None,
        iv=iv_result.iv_value if iv_result else None,
        iv_delta=config.iv_delta,
        iv_degenerate_offsets=iv_result.degenerate_offsets if iv_result else None,
        alpha=overall.alpha if overall else None,
        alpha_r2=overall.r_squared if overall else None,
        alpha_day=day.alpha if day else None,
        alpha_day_r2=day.r_squared if day else None,
        alpha_night=night.alpha if night else None,
        alpha_night_r2=night.r_squared if night else None,
        pov_fundamental=pov_result.pov_fundamental if pov_result else None,
        pov_harmonic=pov_result.pov_harmonic if pov_result else None,
        pov_per_band=list(pov_result.per_band) if pov_result else [],
        pov_method=config.pov_method,
        zero_pad_factor=pov_result.zero_pad_factor if pov_result else None,
        cosinor_mesor=cosinor_fit.mesor if cosinor_fit else None,
        cosinor_amplitude=cosinor_fit.amplitude if cosinor_fit else None,
        cosinor_acrophase=cosinor_fit.acrophase if cosinor_fit else None,
        cosinor_r2=cosinor_fit.r_squared if cosinor_fit else None,
        sweep_omitted=len(sweep.omitted) if sweep else 0,
        warnings=warnings,
        metric_errors=errors,
        elapsed_seconds=elapsed,
    )
    logger.info(
        "recording_analyzed",
        subject_id=recording.subject_id,
        samples=series.n,
        failed_metrics=sorted(errors),
        elapsed_s=round(elapsed, 3),
    )
    return RecordingAnalysis(
        metrics=metrics,
        sweep=sweep,
        dfa_curves=_dfa_curves(fits) if include_curves else None,
        spectrum=spectrum,
        profile=profile,
    )


def process_path(path: Path, config: RunConfig) -> RecordingOutcome:
    """Load and analyse one file; every failure is captured, never raised."""
    source = str(path)
    try:
        recording = load_recording(path)
        return RecordingOutcome(source=source, analysis=analyze_recording(recording, config))
    except ActimetryError as exc:
        logger.warning("recording_failed", source=source, error_type=type(exc).__name__, error=str(exc))
        failure = RecordingFailure(source=Path(path).name, error_type=type(exc).__name__, message=str(exc))
    except Exception as exc:
        logger.exception("recording_crashed", source=source)
        failure = RecordingFailure(source=Path(path).name, error_type=type(exc).__name__, message=str(exc))
    return RecordingOutcome(source=source, failure=failure)


# ========== Cohort ==========


class MetricsPipeline:
    """Run every recording through ``analyze_recording`` and build the cohort report."""

    def __init__(self, config: RunConfig, workers: int | None = None):
        self.config = config
        self.workers = workers or config.workers

    def discover(self) -> list[Path]:
        paths = discover_recordings(self.config.inputs)
        if not paths:
            raise EmptyDataError(f"no recordings found in {[str(p) for p in self.config.inputs]}")
        return paths

    def process(self, paths: list[Path]) -> list[RecordingOutcome]:
        if self.workers > 1 and len(paths) > 1:
            with ProcessPoolExecutor(max_workers=min(self.workers, len(paths))) as pool:
                return list(pool.map(process_path, paths, [self.config] * len(paths)))
        return [process_path(path, self.config) for path in paths]

    def run(self) -> CohortResult:
        """Discover, analyse and assemble.

        Raises:
            EmptyDataError: If the inputs hold no recording files
        """
        paths = self.discover()
        logger.info("pipeline_started", recordings=len(paths), workers=self.workers, config_hash=self.config.config_hash)
        result = self.assemble(self.process(paths))
        logger.info(
            "pipeline_finished",
            succeeded=len(result.report.recordings),
            failed=len(result.report.failures),
            exit_code=result.report.exit_code,
        )
        return result

    def assemble(self, outcomes: list[RecordingOutcome]) -> CohortResult:
        analyses: dict[str, RecordingAnalysis] = {}
        failures: list[RecordingFailure] = []
        for outcome in sorted(outcomes, key=lambda o: o.source):
            if outcome.failure is not None:
                failures.append(outcome.failure)
                continue
            subject_id = outcome.analysis.metrics.subject_id
            if subject_id in analyses:
                failures.append(
                    RecordingFailure(
                        source=Path(outcome.source).name,
                        subject_id=subject_id,
                        error_type="InputValidationError",
                        message=f"duplicate subject_id {subject_id!r}",
                    )
                )
                continue
            analyses[subject_id] = outcome.analysis

        analyses = dict(sorted(analyses.items()))
        recordings = [analysis.metrics for analysis in analyses.values()]
        report_fields = dict(
            config=self.config.to_canonical(),
            config_hash=self.config.config_hash,
            recordings=recordings,
            failures=sorted(failures, key=lambda f: f.source),
        )
        if not recordings:
            logger.error("all_recordings_failed", failed=len(failures))
            return CohortResult(report=MetricsReport(**report_fields, warnings=["no recording could be analysed"]))

        table = MetricTable(rows=[r.to_row() for r in recordings], config_hash=self.config.config_hash)
        warnings: list[str] = []
        correlations: dict[str, CorrelationMatrix] = {}
        for group in [group_stats.ALL_GROUP, *group_stats.reporting_groups(table.groups)]:
            try:
                correlations[group] = group_stats.metric_correlations(table, group=group)
            except EmptyDataError as exc:
                warnings.append(f"correlations for {group}: {exc}")

        sweeps = {sid: a.sweep for sid, a in analyses.items() if a.sweep is not None}
        intervals = {a.metrics.sample_interval for a in analyses.values()}
        sample_interval = intervals.pop() if len(intervals) == 1 else None
        if sample_interval is None:
            warnings.append("recordings differ in sample_interval; sweep intervals are left empty")
        sweep_correlations = group_stats.iv_sweep_correlations(
            group_stats.sweep_tables(table, sweeps), sample_interval=sample_interval
        )
        sweep_curves = group_stats.iv_sweep_group_curves(table, sweeps, self.config.reference_group)

        profiles: dict[str, DailyProfile] = {}
        for group in group_stats.reporting_groups(table.groups):
            members = group_stats.group_members(group)
            selected = [
                a.profile for a in analyses.values() if a.profile is not None and a.metrics.group in members
            ]
            if selected:
                profiles[group] = average_profiles(selected)

        report = MetricsReport(
            **report_fields,
            summaries=group_stats.summarize(table),
            group_tests=group_stats.group_comparisons(table, self.config.test_pairs, alternative=self.config.alternative),
            day_night_tests=group_stats.day_night_comparisons(table, alternative=self.config.alternative),
            correlations=correlations,
            warnings=warnings,
        )
        return CohortResult(
            report=report,
            analyses=analyses,
            sweep_correlations=sweep_correlations,
            sweep_curves=sweep_curves,
            group_profiles=profiles,
        )


def run_pipeline(config: RunConfig, workers: int | None = None) -> CohortResult:
    return MetricsPipeline(config, workers).run()
