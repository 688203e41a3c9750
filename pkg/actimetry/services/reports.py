"""Writing reports and plot-data CSVs to the output directory.

Layout::

    report.json                  cohort report (sorted keys)
    metrics.csv                  one row per recording
    errors.csv                   failure manifest (header only when clean)
    timing.csv                   per-recording wall time
    config.txt                   canonical configuration and its hash
    iv_sweep/<subject>.csv       delta, interval_seconds, iv
    iv_sweep_correlations.csv    delta, interval_seconds, group, metric, r, n
    iv_sweep_groups.csv          delta, interval_seconds, group, mean_iv, n, percent_of_reference
    dfa/<subject>.csv            partition, log2_S, log2_F
    spectrum/<subject>.csv       frequency_hz, power_density, percent_variance
    profiles/<subject>.csv       seconds_of_day, mean_enmo, count
    profiles_by_group.csv        group, seconds_of_day, mean_enmo, count
"""

import json
from pathlib import Path

import pandas as pd
import structlog

from actimetry.models.series import DailyProfile
from actimetry.schemas.metrics import METRIC_COLUMNS, RecordingFailure
from actimetry.schemas.report import MetricsReport
from actimetry.services.pipeline import CohortResult

logger = structlog.get_logger(__name__)

FLOAT_FORMAT = "%.12g"
DIAGNOSTIC_COLUMNS = (
    "retained_days",
    "dropped_days",
    "splices",
    "iv_delta",
    "iv_degenerate_offsets",
    "alpha_r2",
    "alpha_day_r2",
    "alpha_night_r2",
    "zero_pad_factor",
)


def _write_csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def report_json(report: MetricsReport) -> str:
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def metrics_frame(report: MetricsReport) -> pd.DataFrame:
    columns = ["subject_id", "group", *METRIC_COLUMNS, *DIAGNOSTIC_COLUMNS]
    rows = [r.model_dump(include=set(columns)) for r in report.recordings]
    return pd.DataFrame(rows, columns=columns)


def failures_frame(failures: list[RecordingFailure]) -> pd.DataFrame:
    return pd.DataFrame(
        [f.model_dump() for f in failures],
        columns=["source", "subject_id", "error_type", "message"],
    )


def profile_frame(profile: DailyProfile) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "seconds_of_day": profile.bin_starts,
            "mean_enmo": profile.means,
            "count": profile.counts,
        }
    )


def write_report(report: MetricsReport, output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    path = output_dir / "report.json"
    path.write_text(report_json(report), encoding="utf-8")
    return path


def write_cohort(result: CohortResult, output_dir: Path | str) -> list[Path]:
    """Write every artifact of a pipeline run; returns the files written."""
    output_dir = Path(output_dir)
    report = result.report
    written = [write_report(report, output_dir)]

    config_text = "".join(f"{key}={_flat(value)}\n" for key, value in sorted(report.config.items()))
    (output_dir / "config.txt").write_text(f"# config_hash={report.config_hash}\n{config_text}", encoding="utf-8")
    written.append(output_dir / "config.txt")

    written.append(_write_csv(metrics_frame(report), output_dir / "metrics.csv"))
    written.append(_write_csv(failures_frame(report.failures), output_dir / "errors.csv"))
    timing = pd.DataFrame(
        [(a.metrics.subject_id, a.metrics.elapsed_seconds) for a in result.analyses.values()],
        columns=["subject_id", "elapsed_seconds"],
    )
    written.append(_write_csv(timing, output_dir / "timing.csv"))

    for subject_id, analysis in result.analyses.items():
        if analysis.sweep is not None:
            written.append(_write_csv(analysis.sweep.to_frame(), output_dir / "iv_sweep" / f"{subject_id}.csv"))
        if analysis.dfa_curves is not None:
            written.append(_write_csv(analysis.dfa_curves, output_dir / "dfa" / f"{subject_id}.csv"))
        if analysis.spectrum is not None:
            written.append(_write_csv(analysis.spectrum, output_dir / "spectrum" / f"{subject_id}.csv"))
        if analysis.profile is not None:
            written.append(_write_csv(profile_frame(analysis.profile), output_dir / "profiles" / f"{subject_id}.csv"))

    if result.sweep_correlations is not None:
        written.append(_write_csv(result.sweep_correlations, output_dir / "iv_sweep_correlations.csv"))
    if result.sweep_curves is not None:
        written.append(_write_csv(result.sweep_curves, output_dir / "iv_sweep_groups.csv"))
    if result.group_profiles:
        grouped = pd.concat(
            [profile_frame(p).assign(group=g) for g, p in result.group_profiles.items()],
            ignore_index=True,
        )
        written.append(
            _write_csv(grouped[["group", "seconds_of_day", "mean_enmo", "count"]], output_dir / "profiles_by_group.csv")
        )

    logger.info("artifacts_written", output_dir=str(output_dir), files=len(written))
    return written


def _flat(value) -> str:
    if isinstance(value, list):
        return ",".join(":".join(item) if isinstance(item, list) else str(item) for item in value)
    return "" if value is None else str(value)
