"""
Tests for interdaily stability, intradaily variability and the IV sweep.
"""

import numpy as np
import pytest
from scipy import signal

from conftest import make_series
from actimetry.core.exceptions import (
    DegenerateSeriesError,
    DurationError,
    EmptyDataError,
    InvalidParameterError,
)
from actimetry.services.circadian import interdaily_stability, intradaily_variability, iv_sweep


class TestInterdailyStability:
    """IS = variance of hourly means / total variance"""

    def test_hour_constant_periodic_series_is_one(self, rng):
        levels = rng.uniform(0, 3, 24)
        values = np.tile(np.repeat(levels, 60), 5)
        result = interdaily_stability(make_series(values, sample_interval=60.0))
        assert result.is_value == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(result.hourly_means, levels)

    def test_constant_series_is_degenerate(self):
        with pytest.raises(DegenerateSeriesError):
            interdaily_stability(make_series(np.ones(1440), sample_interval=60.0))

    def test_shorter_than_a_day(self, rng):
        with pytest.raises(DurationError):
            interdaily_stability(make_series(rng.uniform(0, 1, 1000), sample_interval=60.0))

    def test_empty_hour_bin(self, rng):
        # Clock times wrap at 23:00 so the last hour bin stays empty
        values = rng.uniform(0, 1, 1440)
        series = make_series(values, sample_interval=60.0, time_of_day=np.mod(np.arange(1440) * 60.0, 82800.0))
        with pytest.raises(EmptyDataError):
            interdaily_stability(series)

    def test_iid_noise_tracks_bin_count_over_n(self, rng):
        n = 24 * 720 * 7
        estimates = [
            interdaily_stability(make_series(rng.uniform(0, 1, n), sample_interval=5.0)).is_value
            for _ in range(40)
        ]
        assert np.mean(estimates) == pytest.approx(24 / n, rel=0.5)


class TestIntradailyVariability:
    """IV with multi-offset subsampling"""

    def test_hand_case(self):
        result = intradaily_variability(make_series([1, 2, 3, 4, 5]), delta=1)
        assert result.iv_value == pytest.approx(0.5, abs=1e-12)
        assert result.m == 5

    def test_alternating_series(self):
        values = np.tile([2.0, 0.0], 50)
        result = intradaily_variability(make_series(values), delta=1)
        assert result.iv_value == pytest.approx(4.0, rel=1e-12)

    def test_two_points_per_offset_is_four(self, rng):
        values = rng.uniform(0, 1, 20)
        result = intradaily_variability(make_series(values), delta=10)
        assert result.m == 2
        assert result.iv_value == pytest.approx(4.0, abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(InvalidParameterError):
            intradaily_variability(make_series([1, 2, 3]), delta=2)

    def test_degenerate_offsets_are_excluded(self):
        # Offset 1 is constant, offset 2 alternates
        values = np.array([1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0])
        result = intradaily_variability(make_series(values), delta=2)
        assert result.degenerate_offsets == 1
        assert np.isnan(result.per_offset[0])
        assert result.iv_value == pytest.approx(result.per_offset[1])

    def test_all_offsets_constant(self):
        values = np.tile([1.0, 3.0], 10)
        with pytest.raises(DegenerateSeriesError):
            intradaily_variability(make_series(values), delta=2)

    def test_iid_noise_is_near_two(self, rng):
        estimates = [
            intradaily_variability(make_series(rng.uniform(0, 1, 100_000)), delta=1).iv_value
            for _ in range(20)
        ]
        assert np.mean(estimates) == pytest.approx(2.0, abs=0.05)


class TestSweep:
    """IV as a function of delta"""

    def test_single_delta_matches_direct_call(self, noisy_week):
        sweep = iv_sweep(noisy_week, [1])
        assert sweep.deltas.tolist() == [1]
        assert sweep.iv_values[0] == pytest.approx(intradaily_variability(noisy_week, 1).iv_value)

    def test_failed_deltas_are_omitted(self):
        sweep = iv_sweep(make_series(np.arange(1.0, 11.0)), [1, 5, 6])
        assert sweep.deltas.tolist() == [1, 5]
        assert set(sweep.omitted) == {6}

    def test_interval_seconds_and_frame(self, noisy_week):
        sweep = iv_sweep(noisy_week, [1, 5, 60])
        frame = sweep.to_frame()
        assert list(frame.columns) == ["delta", "interval_seconds", "iv"]
        assert frame["interval_seconds"].tolist() == [60.0, 300.0, 3600.0]

    def test_threaded_sweep_matches_serial(self, noisy_week):
        serial = iv_sweep(noisy_week, range(1, 30))
        threaded = iv_sweep(noisy_week, range(1, 30), workers=4)
        np.testing.assert_array_equal(serial.iv_values, threaded.iv_values)

    def test_ar1_noise_increases_with_delta(self, rng):
        noise = signal.lfilter([1.0], [1.0, -0.9], rng.standard_normal(50_000))
        series = make_series(noise - noise.min())
        sweep = iv_sweep(series, [1, 2, 5, 10, 50])
        assert sweep.value_at(1) < sweep.value_at(50)
        assert np.all(np.diff(sweep.iv_values[:4]) > 0)


class TestAffineInvariance:
    """IS and IV ignore units and offsets"""

    @pytest.mark.parametrize("scale,shift", [(3.0, 2.0), (0.01, 0.0), (250.0, 7.5)])
    def test_is_and_iv_unchanged(self, noisy_week, scale, shift):
        transformed = make_series(scale * noisy_week.values + shift, sample_interval=noisy_week.sample_interval)

        assert interdaily_stability(transformed).is_value == pytest.approx(
            interdaily_stability(noisy_week).is_value, rel=1e-9
        )
        for delta in (1, 5, 60):
            assert intradaily_variability(transformed, delta).iv_value == pytest.approx(
                intradaily_variability(noisy_week, delta).iv_value, rel=1e-9
            )
