"""Synthetic cohort recipes."""

from datetime import datetime, timezone
from typing import Literal

from pydantic import Field, field_validator, model_validator

from actimetry.models.series import SECONDS_PER_DAY
from actimetry.schemas.base import FrozenModel

NoiseModel = Literal["none", "iid", "ar1", "pink", "random_walk"]
SignalShape = Literal["none", "sine", "square"]


class GroupRecipe(FrozenModel):
    """Recordings of one group: a 24 h waveform plus a noise process.

    ``amplitude_spread`` draws each recording's amplitude uniformly from
    ``amplitude * [1 - spread, 1 + spread]``. When ``night_noise`` is set,
    samples inside the night window are replaced by an independent
    realisation of that process.
    """

    group: str = Field(min_length=1)
    count: int = Field(default=1, ge=1)
    days: int = Field(default=14, ge=1)
    sample_interval: float = Field(default=5.0, gt=0)
    start_time: datetime = datetime(2024, 1, 1, tzinfo=timezone.utc)

    shape: SignalShape = "sine"
    amplitude: float = Field(default=1.0, ge=0)
    amplitude_spread: float = Field(default=0.0, ge=0, le=1)
    baseline: float = Field(default=1.0, ge=0)
    acrophase_hours: float = Field(default=14.0, ge=0, lt=24)

    noise: NoiseModel = "none"
    noise_scale: float = Field(default=0.0, ge=0)
    ar_coefficient: float = Field(default=0.0, gt=-1, lt=1)

    night_noise: NoiseModel | None = None
    night_noise_scale: float = Field(default=1.0, ge=0)
    night_start: float = Field(default=23.0, ge=0, lt=24)
    night_end: float = Field(default=6.0, ge=0, lt=24)

    @field_validator("start_time")
    @classmethod
    def _aware(cls, value: datetime) -> datetime:
        if value.tzinfo is None:
            raise ValueError("start_time must carry a UTC offset")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "GroupRecipe":
        samples_per_day = SECONDS_PER_DAY / self.sample_interval
        if abs(samples_per_day - round(samples_per_day)) > 1e-9:
            raise ValueError("sample_interval must divide 86400 s")
        if self.noise == "ar1" and self.ar_coefficient == 0:
            raise ValueError("ar1 noise needs a nonzero ar_coefficient")
        if self.noise != "none" and self.noise_scale == 0:
            raise ValueError(f"{self.noise} noise needs a positive noise_scale")
        if self.shape == "none" and self.noise == "none" and self.night_noise is None:
            raise ValueError("recipe generates a constant series")
        return self

    @property
    def n_samples(self) -> int:
        return int(round(self.days * SECONDS_PER_DAY / self.sample_interval))


class CohortRecipe(FrozenModel):
    name: str = "cohort"
    seed: int = 0
    groups: list[GroupRecipe] = Field(min_length=1)

    @model_validator(mode="after")
    def _unique_groups(self) -> "CohortRecipe":
        names = [group.group for group in self.groups]
        if len(set(names)) != len(names):
            raise ValueError("group names must be unique")
        return self
