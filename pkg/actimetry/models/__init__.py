from actimetry.models.circadian import IsResult, IvResult, IvSweep
from actimetry.models.dfa import DfaConfig, DfaFit
from actimetry.models.recording import GapRange, GroupLabel, Provenance, Recording
from actimetry.models.series import DailyProfile, DayNightSchedule, EnmoSeries
from actimetry.models.spectral import CosinorFit, HarmonicBand, PovResult, SpectralEstimate

__all__ = [
    "CosinorFit",
    "DailyProfile",
    "DayNightSchedule",
    "DfaConfig",
    "DfaFit",
    "EnmoSeries",
    "GapRange",
    "GroupLabel",
    "HarmonicBand",
    "IsResult",
    "IvResult",
    "IvSweep",
    "PovResult",
    "Provenance",
    "Recording",
    "SpectralEstimate",
]
