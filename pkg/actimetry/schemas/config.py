"""Analysis run configuration.

Loaded from a flat ``key=value`` file; any key the model does not declare
is rejected. ``output_dir`` and ``workers`` only steer execution and are
left out of the canonical payload, so moving the output or changing the
degree of parallelism never changes a report.
"""

from pathlib import Path
from typing import Any, Literal

from pydantic import ConfigDict, Field, ValidationError, field_validator, model_validator

from actimetry.core.exceptions import ConfigError
from actimetry.core.hashing import canonical_json, config_hash
from actimetry.models.dfa import DfaConfig
from actimetry.models.series import DayNightSchedule
from actimetry.models.spectral import BAND_HIGH_PERIOD_S, BAND_LOW_PERIOD_S
from actimetry.schemas.base import FrozenModel

EXECUTION_FIELDS = frozenset({"output_dir", "workers"})
LIST_FIELDS = frozenset({"inputs", "test_pairs"})


class RunConfig(FrozenModel):
    """Every knob of a pipeline run, with defaults matching the published settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    inputs: list[Path] = Field(default_factory=list)
    output_dir: Path | None = None
    workers: int = Field(default=1, ge=1)

    # IV
    iv_delta: int = Field(default=60, ge=1)
    sweep_start: int = Field(default=1, ge=1)
    sweep_stop: int = Field(default=720, ge=1)
    sweep_step: int = Field(default=1, ge=1)

    # DFA
    dfa_scale_start: float = 4.0
    dfa_scale_stop: float = 8.0
    dfa_scale_step: float = Field(default=0.25, gt=0)
    dfa_profile_source: Literal["partition", "full"] = "partition"
    night_start: float = Field(default=23.0, ge=0, lt=24)
    night_end: float = Field(default=6.0, ge=0, lt=24)

    # Spectral
    k_max: int = Field(default=4, ge=1)
    band_low_period_s: float = Field(default=BAND_LOW_PERIOD_S, gt=0)
    band_high_period_s: float = Field(default=BAND_HIGH_PERIOD_S, gt=0)
    pov_method: Literal["fourier", "trapezoid"] = "fourier"
    zero_pad_factor: int | None = Field(default=None, ge=1)
    cosinor_period_hours: float = Field(default=24.0, gt=0)

    # Cohort
    profile_bin_width: int = Field(default=600, ge=1)
    reference_group: str | None = None
    test_pairs: list[tuple[str, str]] | None = None
    alternative: Literal["two-sided", "greater", "less"] = "two-sided"

    # Synthetic fixtures
    seed: int = 0

    @field_validator("inputs", mode="before")
    @classmethod
    def _split_inputs(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("test_pairs", mode="before")
    @classmethod
    def _split_pairs(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = [item.strip() for item in value.split(",") if item.strip()]
        if isinstance(value, list | tuple):
            pairs = []
            for item in value:
                if isinstance(item, str):
                    first, sep, second = item.partition(":")
                    if not sep or not first or not second:
                        raise ValueError(f"test pair {item!r} must read group_a:group_b")
                    item = (first.strip(), second.strip())
                pairs.append(item)
            return pairs
        return value

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.sweep_stop < self.sweep_start:
            raise ValueError("sweep_stop must not be below sweep_start")
        if self.dfa_scale_stop < self.dfa_scale_start:
            raise ValueError("dfa_scale_stop must not be below dfa_scale_start")
        if self.band_high_period_s >= self.band_low_period_s:
            raise ValueError("band_high_period_s must be shorter than band_low_period_s")
        return self

    # ========== Derived settings ==========

    @property
    def sweep_deltas(self) -> list[int]:
        return list(range(self.sweep_start, self.sweep_stop + 1, self.sweep_step))

    def dfa_config(self) -> DfaConfig:
        return DfaConfig.from_range(self.dfa_scale_start, self.dfa_scale_stop, self.dfa_scale_step)

    def schedule(self) -> DayNightSchedule:
        return DayNightSchedule(night_start=self.night_start, night_end=self.night_end)

    def to_canonical(self) -> dict[str, Any]:
        """JSON-ready analysis settings, execution-only fields excluded."""
        return self.model_dump(mode="json", exclude=set(EXECUTION_FIELDS))

    @property
    def config_hash(self) -> str:
        return config_hash(self.to_canonical())

    def canonical_text(self) -> str:
        return canonical_json(self.to_canonical())


def parse_config_text(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {number}: expected key=value, got {raw.strip()!r}")
        if key in values:
            raise ConfigError(f"line {number}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def build_run_config(values: dict[str, Any]) -> RunConfig:
    """Validate raw values; empty strings mean 'use the default'."""
    cleaned = {key: value for key, value in values.items() if value is not None and value != ""}
    try:
        return RunConfig.model_validate(cleaned)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc']) or 'config'}: {error['msg']}"
            for error in exc.errors()
        )
        raise ConfigError(problems) from exc


def load_run_config(path: Path | str | None = None, **overrides: Any) -> RunConfig:
    """Read a config file (optional) and apply ``overrides`` on top of it.

    Args:
        path: Flat key=value file
        **overrides: Values that win over the file, typically CLI flags;
            None means 'not given'

    Raises:
        ConfigError: On unknown keys or values that fail validation
    """
    values: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        values.update(parse_config_text(text))
    values.update({key: value for key, value in overrides.items() if value is not None})
    return build_run_config(values)
