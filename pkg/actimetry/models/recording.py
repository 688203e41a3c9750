"""Recording model: one subject's accelerometry on a uniform time grid.

Missing samples are represented twice: as NaN in ``samples`` and as
half-open ``GapRange`` index ranges, so day exclusion can work on indices
without rescanning values.
"""

from dataclasses import dataclass, field
from datetime import date, datetime
from enum import Enum

import numpy as np

from actimetry.core.exceptions import InputValidationError
from actimetry.models._arrays import frozen_array
from actimetry.models.series import EnmoSeries


class GroupLabel(str, Enum):
    """Participant groups with a fixed meaning in cohort reports."""

    NON_INTERVENTION = "non_intervention"
    INTERVENTION = "intervention"
    WITHOUT_DEMENTIA = "without_dementia"

    @classmethod
    def normalize(cls, label: str) -> str:
        """Map free-form spellings onto a known label; keep other labels verbatim."""
        key = label.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {
            "nonintervention": cls.NON_INTERVENTION,
            "non_intervention": cls.NON_INTERVENTION,
            "intervention": cls.INTERVENTION,
            "withoutdementia": cls.WITHOUT_DEMENTIA,
            "without_dementia": cls.WITHOUT_DEMENTIA,
        }
        known = aliases.get(key)
        return known.value if known else label.strip()


# Pseudo-group pooling both groups with dementia
DEMENTIA_GROUP = "dementia"
DEMENTIA_MEMBERS = (GroupLabel.NON_INTERVENTION.value, GroupLabel.INTERVENTION.value)


@dataclass(frozen=True, order=True)
class GapRange:
    """Missing grid indices ``[start, stop)``."""

    start: int
    stop: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.stop <= self.start:
            raise InputValidationError(f"Invalid gap range [{self.start}, {self.stop})")

    @property
    def length(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class Provenance:
    """How the sample sequence was derived from the raw file."""

    source: str | None = None
    retained_days: tuple[date, ...] = ()
    dropped_days: tuple[date, ...] = ()
    splices: tuple[int, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Recording:
    """Raw triaxial (N, 3) or ENMO (N,) samples with subject metadata."""

    subject_id: str
    group: str
    start_time: datetime
    sample_interval: float
    samples: np.ndarray
    gaps: tuple[GapRange, ...] = ()
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", frozen_array(self.samples))
        object.__setattr__(self, "group", GroupLabel.normalize(self.group))
        object.__setattr__(self, "gaps", tuple(sorted(self.gaps)))

        if not self.subject_id:
            raise InputValidationError("subject_id must not be empty")
        if not self.sample_interval > 0:
            raise InputValidationError("sample_interval must be positive")
        if self.start_time.tzinfo is None:
            raise InputValidationError(f"{self.subject_id}: start_time must carry a UTC offset")
        if self.samples.ndim not in (1, 2) or (self.samples.ndim == 2 and self.samples.shape[1] != 3):
            raise InputValidationError(f"{self.subject_id}: samples must be (N,) ENMO or (N, 3) triaxial")
        if self.n == 0:
            raise InputValidationError(f"{self.subject_id}: recording holds no samples")

        previous_stop = 0
        for gap in self.gaps:
            if gap.start < previous_stop:
                raise InputValidationError(f"{self.subject_id}: gap ranges overlap")
            if gap.stop > self.n:
                raise InputValidationError(f"{self.subject_id}: gap range exceeds recording length")
            previous_stop = gap.stop

        observed = self.samples[~self.missing_mask()]
        if not np.all(np.isfinite(observed)) or np.any(observed < 0):
            raise InputValidationError(f"{self.subject_id}: samples must be finite and nonnegative")

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    @property
    def is_triaxial(self) -> bool:
        return self.samples.ndim == 2

    def missing_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        for gap in self.gaps:
            mask[gap.start:gap.stop] = True
        return mask

    def to_series(self) -> EnmoSeries:
        """ENMO series of a gap-free recording (run ``exclude_missing_days`` first)."""
        if self.gaps:
            raise InputValidationError(f"{self.subject_id}: recording still contains gaps")
        if self.is_triaxial:
            from actimetry.services.core_series import enmo_from_triaxial

            values = enmo_from_triaxial(self.samples)
        else:
            values = self.samples
        return EnmoSeries(
            values=values,
            start_time=self.start_time,
            sample_interval=self.sample_interval,
            splices=self.provenance.splices,
        )
