"""Shared fixtures: seeded generators and series/recording builders."""

from datetime import datetime, timezone

import numpy as np
import pytest

from actimetry.models.recording import GapRange, Recording
from actimetry.models.series import SECONDS_PER_DAY, EnmoSeries

MIDNIGHT = datetime(2024, 3, 4, tzinfo=timezone.utc)


def make_series(values, sample_interval: float = 5.0, start_time: datetime = MIDNIGHT, **kwargs) -> EnmoSeries:
    return EnmoSeries(values=np.asarray(values, dtype=float), start_time=start_time, sample_interval=sample_interval, **kwargs)


def daily_cosine(days: int, sample_interval: float = 5.0, mesor: float = 1.0, amplitude: float = 1.0) -> np.ndarray:
    t = np.arange(int(days * SECONDS_PER_DAY / sample_interval)) * sample_interval
    return mesor + amplitude * np.cos(2.0 * np.pi * t / SECONDS_PER_DAY)


@pytest.fixture
def rng():
    """Seeded generator so Monte-Carlo checks are reproducible"""
    return np.random.default_rng(20240304)


@pytest.fixture
def series_factory():
    """Build an EnmoSeries starting at midnight UTC"""
    return make_series


@pytest.fixture
def recording_factory():
    """Build a Recording from ENMO values, with optional missing index ranges"""

    def build(values, sample_interval=60.0, start_time=MIDNIGHT, gaps=(), subject_id="s01", group="intervention"):
        samples = np.asarray(values, dtype=float).copy()
        for start, stop in gaps:
            samples[start:stop] = np.nan
        return Recording(
            subject_id=subject_id,
            group=group,
            start_time=start_time,
            sample_interval=sample_interval,
            samples=samples,
            gaps=tuple(GapRange(start, stop) for start, stop in gaps),
        )

    return build


@pytest.fixture
def noisy_week(rng):
    """Seven days of 60 s samples with a daily rhythm plus noise"""
    values = daily_cosine(7, 60.0, mesor=2.0) + 0.3 * rng.standard_normal(7 * 1440)
    return make_series(np.clip(values, 0, None), sample_interval=60.0)
