"""Per-recording metrics and the cohort report."""

from typing import Any

from pydantic import Field

from actimetry import __version__
from actimetry.schemas.base import FrozenModel
from actimetry.schemas.config import EXECUTION_FIELDS
from actimetry.schemas.metrics import (
    CorrelationMatrix,
    GroupComparison,
    MetricRow,
    MetricSummary,
    MetricTable,
    RecordingFailure,
)

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_FATAL = 2


class RecordingMetrics(FrozenModel):
    """Everything computed for one recording.

    A metric that could not be computed is None and its reason is listed
    in ``metric_errors``. ``elapsed_seconds`` is kept out of serialized
    reports so that repeated runs produce identical files.
    """

    subject_id: str
    group: str
    source: str
    sample_interval: float
    n_samples: int
    retained_days: int
    dropped_days: int
    retained_dates: list[str] = Field(default_factory=list)
    dropped_dates: list[str] = Field(default_factory=list)
    splices: int = 0

    is_value: float | None = None
    iv: float | None = None
    iv_delta: int
    iv_degenerate_offsets: int | None = None

    alpha: float | None = None
    alpha_r2: float | None = None
    alpha_day: float | None = None
    alpha_day_r2: float | None = None
    alpha_night: float | None = None
    alpha_night_r2: float | None = None

    pov_fundamental: float | None = None
    pov_harmonic: float | None = None
    pov_per_band: list[float] = Field(default_factory=list)
    pov_method: str
    zero_pad_factor: int | None = None

    cosinor_mesor: float | None = None
    cosinor_amplitude: float | None = None
    cosinor_acrophase: float | None = None
    cosinor_r2: float | None = None

    sweep_omitted: int = 0
    warnings: list[str] = Field(default_factory=list)
    metric_errors: dict[str, str] = Field(default_factory=dict)
    elapsed_seconds: float | None = Field(default=None, exclude=True)

    def to_row(self) -> MetricRow:
        return MetricRow(
            subject_id=self.subject_id,
            group=self.group,
            is_value=self.is_value,
            iv=self.iv,
            alpha=self.alpha,
            alpha_day=self.alpha_day,
            alpha_night=self.alpha_night,
            pov_fundamental=self.pov_fundamental,
            pov_harmonic=self.pov_harmonic,
            cosinor_r2=self.cosinor_r2,
        )


class MetricsReport(FrozenModel):
    """Cohort report; every value is recomputable from the inputs and ``config``."""

    version: str = __version__
    config: dict[str, Any]
    config_hash: str
    # Execution-only settings left out of config and config_hash
    hash_excluded_fields: list[str] = Field(default_factory=lambda: sorted(EXECUTION_FIELDS))
    recordings: list[RecordingMetrics] = Field(default_factory=list)
    summaries: dict[str, dict[str, MetricSummary]] = Field(default_factory=dict)
    group_tests: list[GroupComparison] = Field(default_factory=list)
    day_night_tests: list[GroupComparison] = Field(default_factory=list)
    correlations: dict[str, CorrelationMatrix] = Field(default_factory=dict)
    failures: list[RecordingFailure] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @property
    def table(self) -> MetricTable:
        return MetricTable(rows=[r.to_row() for r in self.recordings], config_hash=self.config_hash)

    @property
    def exit_code(self) -> int:
        if not self.recordings:
            return EXIT_FATAL
        return EXIT_PARTIAL if self.failures else EXIT_OK
