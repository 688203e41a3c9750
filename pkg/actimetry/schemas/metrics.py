"""Cohort tables and statistical results."""

import math
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import Field, field_validator, model_validator

from actimetry.schemas.base import FrozenModel

METRIC_COLUMNS = (
    "is_value",
    "iv",
    "alpha",
    "alpha_day",
    "alpha_night",
    "pov_fundamental",
    "pov_harmonic",
    "cosinor_r2",
)

METRIC_UNITS = {
    "is_value": "dimensionless",
    "iv": "dimensionless",
    "alpha": "dimensionless",
    "alpha_day": "dimensionless",
    "alpha_night": "dimensionless",
    "pov_fundamental": "fraction of variance",
    "pov_harmonic": "fraction of variance",
    "cosinor_r2": "dimensionless",
}

Alternative = Literal["two-sided", "greater", "less"]


class MetricRow(FrozenModel):
    """One recording's summary statistics; None where a metric failed."""

    subject_id: str
    group: str
    is_value: float | None = None
    iv: float | None = None
    alpha: float | None = None
    alpha_day: float | None = None
    alpha_night: float | None = None
    pov_fundamental: float | None = None
    pov_harmonic: float | None = None
    cosinor_r2: float | None = None

    @field_validator(*METRIC_COLUMNS)
    @classmethod
    def _finite_or_none(cls, value: float | None) -> float | None:
        if value is None or not math.isfinite(value):
            return None
        return value


class MetricTable(FrozenModel):
    """One row per recording, keyed by subject_id."""

    rows: list[MetricRow]
    column_units: dict[str, str] = Field(default_factory=lambda: dict(METRIC_UNITS))
    config_hash: str | None = None

    @model_validator(mode="after")
    def _unique_subjects(self) -> "MetricTable":
        seen: set[str] = set()
        for row in self.rows:
            if row.subject_id in seen:
                raise ValueError(f"duplicate subject_id {row.subject_id!r}")
            seen.add(row.subject_id)
        return self

    @property
    def groups(self) -> list[str]:
        return sorted({row.group for row in self.rows})

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([row.model_dump() for row in self.rows], columns=["subject_id", "group", *METRIC_COLUMNS])
        return frame.astype({column: float for column in METRIC_COLUMNS})


class UTestResult(FrozenModel):
    u_statistic: float = Field(ge=0)
    p_value: float = Field(ge=0, le=1)
    method: Literal["exact", "normal_approx"]
    n1: int
    n2: int
    alternative: Alternative = "two-sided"


class CorrelationMatrix(FrozenModel):
    """Symmetric Pearson matrix; NaN (null) where a column is constant."""

    labels: list[str]
    values: list[list[float | None]]

    def to_frame(self) -> pd.DataFrame:
        data = [[np.nan if v is None else v for v in row] for row in self.values]
        return pd.DataFrame(data, index=self.labels, columns=self.labels)

    def get(self, first: str, second: str) -> float:
        value = self.values[self.labels.index(first)][self.labels.index(second)]
        return float("nan") if value is None else value


class MetricSummary(FrozenModel):
    n: int
    mean: float
    sd: float | None
    min: float
    max: float
    median: float


class GroupComparison(FrozenModel):
    metric: str
    group_a: str
    group_b: str
    result: UTestResult


class RecordingFailure(FrozenModel):
    source: str
    subject_id: str | None = None
    error_type: str
    message: str
