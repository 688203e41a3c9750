"""
Tests for rank tests, correlations, group summaries and IV-sweep curves.
"""

import math

import numpy as np
import pandas as pd
import pytest

from actimetry.core.exceptions import DegenerateSeriesError, EmptyDataError, InvalidParameterError
from actimetry.models.circadian import IvSweep
from actimetry.schemas.metrics import MetricRow, MetricTable
from actimetry.services.group_stats import (
    day_night_comparisons,
    default_test_pairs,
    group_comparisons,
    iv_sweep_correlations,
    iv_sweep_group_curves,
    mann_whitney_u,
    metric_correlations,
    pearson,
    reporting_groups,
    summarize,
    sweep_tables,
)


def _table(*rows: dict) -> MetricTable:
    return MetricTable(rows=[MetricRow(**row) for row in rows])


@pytest.fixture
def cohort():
    """Six recordings over three groups with IV = 1 - IS"""
    specs = [
        ("w1", "without_dementia", 0.8, 1.10),
        ("w2", "without_dementia", 0.7, 1.00),
        ("n1", "non_intervention", 0.3, 0.60),
        ("n2", "non_intervention", 0.4, 0.70),
        ("i1", "intervention", 0.5, 0.80),
        ("i2", "intervention", 0.6, 0.90),
    ]
    return _table(
        *(
            {
                "subject_id": sid,
                "group": group,
                "is_value": is_value,
                "iv": 1.0 - is_value,
                "alpha": alpha,
                "alpha_day": alpha,
                "alpha_night": alpha - 0.2,
                "pov_harmonic": is_value / 2,
            }
            for sid, group, is_value, alpha in specs
        )
    )


class TestMannWhitney:
    """U statistic and p-values"""

    def test_separated_samples(self):
        result = mann_whitney_u([1, 2, 3], [4, 5, 6])
        assert result.u_statistic == 0
        assert result.method == "exact"
        assert result.p_value == pytest.approx(0.1)

    def test_interleaved_samples(self):
        assert mann_whitney_u([1, 4], [2, 3]).u_statistic == 2

    def test_exact_two_sided_p(self):
        assert mann_whitney_u([1, 2], [3, 4]).p_value == pytest.approx(1 / 3)

    def test_statistics_sum_to_pair_count(self):
        a, b = [1.0, 2.0, 2.0, 5.0], [2.0, 3.0]
        forward = mann_whitney_u(a, b)
        backward = mann_whitney_u(b, a)
        assert forward.u_statistic + backward.u_statistic == pytest.approx(len(a) * len(b))
        assert forward.method == "normal_approx"

    def test_large_samples_use_normal_approximation(self, rng):
        result = mann_whitney_u(rng.normal(size=30), rng.normal(size=30))
        assert result.method == "normal_approx"
        assert 0.0 <= result.p_value <= 1.0

    def test_all_tied(self):
        result = mann_whitney_u([1.0, 1.0], [1.0, 1.0, 1.0])
        assert result.u_statistic == pytest.approx(3.0)
        assert result.p_value == 1.0

    def test_one_sided(self):
        result = mann_whitney_u([4, 5, 6], [1, 2, 3], alternative="greater")
        assert result.p_value == pytest.approx(0.05)

    def test_empty_sample(self):
        with pytest.raises(EmptyDataError):
            mann_whitney_u([], [1.0])

    def test_unknown_alternative(self):
        with pytest.raises(InvalidParameterError):
            mann_whitney_u([1], [2], alternative="sideways")

    @pytest.mark.parametrize("shift", [0.0, 0.3, 0.6, 1.0])
    def test_exact_and_normal_agree_at_ten_each(self, rng, shift):
        a = rng.standard_normal(10) + shift
        b = rng.standard_normal(10)
        exact = mann_whitney_u(a, b, method="exact")
        approx = mann_whitney_u(a, b, method="normal_approx")

        assert exact.method == "exact"
        assert approx.method == "normal_approx"
        assert exact.u_statistic == approx.u_statistic
        assert abs(exact.p_value - approx.p_value) < 0.02

    def test_exact_rejects_ties(self):
        with pytest.raises(InvalidParameterError, match="ties"):
            mann_whitney_u([1.0, 2.0], [2.0, 3.0], method="exact")

    def test_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            mann_whitney_u([1.0], [2.0], method="bootstrap")


class TestPearson:
    """Sample correlation"""

    @pytest.mark.parametrize(
        "x,y,expected",
        [
            ((1, 2, 3), (2, 4, 6), 1.0),
            ((1, 2, 3), (3, 2, 1), -1.0),
            ((1, 2, 3), (1, 3, 2), 0.5),
        ],
    )
    def test_examples(self, x, y, expected):
        assert pearson(x, y) == pytest.approx(expected)

    def test_constant_input(self):
        with pytest.raises(DegenerateSeriesError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_too_few_points(self):
        with pytest.raises(InvalidParameterError):
            pearson([1, 2], [2, 1])

    def test_unequal_lengths(self):
        with pytest.raises(InvalidParameterError):
            pearson([1, 2, 3], [1, 2, 3, 4])


class TestSummaries:
    """Per-group descriptive statistics"""

    def test_pooled_groups_are_added(self):
        assert reporting_groups(["intervention", "without_dementia"]) == [
            "intervention",
            "without_dementia",
            "dementia",
        ]
        assert reporting_groups(["a", "b"]) == ["a", "b"]

    def test_sample_sd_and_single_value(self):
        table = _table(
            {"subject_id": "a", "group": "g1", "is_value": 1.0},
            {"subject_id": "b", "group": "g1", "is_value": 3.0},
            {"subject_id": "c", "group": "g2", "is_value": 2.0},
        )
        summary = summarize(table, metrics=("is_value",))
        assert summary["g1"]["is_value"].sd == pytest.approx(math.sqrt(2.0))
        assert summary["g1"]["is_value"].mean == pytest.approx(2.0)
        assert summary["g2"]["is_value"].sd is None
        assert summary["all"]["is_value"].n == 3
        assert summary["all"]["is_value"].median == pytest.approx(2.0)

    def test_missing_metrics_are_skipped(self):
        table = _table({"subject_id": "a", "group": "g", "is_value": 0.5})
        assert "alpha" not in summarize(table)["g"]

    def test_empty_table(self):
        with pytest.raises(EmptyDataError):
            summarize(MetricTable(rows=[]))

    def test_dementia_pool(self, cohort):
        summary = summarize(cohort, metrics=("is_value",))
        assert summary["dementia"]["is_value"].n == 4
        assert summary["dementia"]["is_value"].mean == pytest.approx(0.45)


class TestCorrelations:
    """Metric correlation matrices"""

    def test_iv_mirrors_is(self, cohort):
        matrix = metric_correlations(cohort)
        assert matrix.get("is_value", "iv") == pytest.approx(-1.0)
        assert matrix.get("is_value", "pov_harmonic") == pytest.approx(1.0)
        assert matrix.get("alpha", "alpha") == 1.0

    def test_constant_column_is_null(self):
        table = _table(
            *(
                {"subject_id": f"s{i}", "group": "g", "is_value": 0.5, "iv": float(i), "alpha": float(i % 2), "pov_harmonic": i / 10}
                for i in range(4)
            )
        )
        matrix = metric_correlations(table)
        assert math.isnan(matrix.get("is_value", "iv"))
        assert matrix.to_frame().loc["iv", "pov_harmonic"] == pytest.approx(1.0)

    def test_too_few_rows(self, cohort):
        with pytest.raises(EmptyDataError):
            metric_correlations(cohort, group="intervention")

    def test_unknown_metric(self, cohort):
        with pytest.raises(InvalidParameterError):
            metric_correlations(cohort, metrics=("is_value", "steps"))

    def test_row_order_does_not_matter(self, cohort, rng):
        metrics = ("is_value", "iv", "alpha", "pov_harmonic")
        order = rng.permutation(len(cohort.rows))
        shuffled = MetricTable(rows=[cohort.rows[i] for i in order])

        expected = metric_correlations(cohort, metrics=metrics).to_frame()
        actual = metric_correlations(shuffled, metrics=metrics).to_frame()
        pd.testing.assert_frame_equal(actual, expected, rtol=1e-12)


class TestGroupTests:
    """Between-group and day/night comparisons"""

    def test_default_pairs(self, cohort):
        pairs = default_test_pairs(row.group for row in cohort.rows)
        assert ("intervention", "non_intervention") in pairs
        assert ("dementia", "without_dementia") in pairs
        assert len(pairs) == 4

    def test_comparisons_cover_available_metrics(self, cohort):
        results = group_comparisons(cohort, pairs=[("dementia", "without_dementia")], metrics=("is_value", "cosinor_r2"))
        assert [r.metric for r in results] == ["is_value"]
        assert results[0].result.n1 == 4
        assert results[0].result.u_statistic == 0

    def test_day_night(self, cohort):
        results = day_night_comparisons(cohort)
        labels = {r.group_a for r in results}
        assert "all:day" in labels
        assert "dementia:day" in labels
        overall = next(r for r in results if r.group_a == "all:day")
        assert overall.metric == "alpha_day_vs_night"
        assert overall.result.n1 == overall.result.n2 == 6


class TestSweepCurves:
    """IV(delta) correlations and group means"""

    @pytest.fixture
    def sweeps(self, cohort):
        """IV(delta) = delta * (1 - IS) for every recording"""
        return {
            row.subject_id: IvSweep(
                deltas=np.array([1, 2]),
                iv_values=np.array([1.0, 2.0]) * (1.0 - row.is_value),
                sample_interval=5.0,
            )
            for row in cohort.rows
        }

    def test_tables_replace_iv(self, cohort, sweeps):
        tables = sweep_tables(cohort, sweeps)
        assert sorted(tables) == [1, 2]
        row = next(r for r in tables[2].rows if r.subject_id == "w1")
        assert row.iv == pytest.approx(0.4)

    def test_correlation_with_is_is_minus_one(self, cohort, sweeps):
        frame = iv_sweep_correlations(sweep_tables(cohort, sweeps), sample_interval=5.0)
        overall = frame[(frame["group"] == "all") & (frame["metric"] == "is_value")]
        assert overall["delta"].tolist() == [1, 2]
        assert overall["interval_seconds"].tolist() == [5.0, 10.0]
        np.testing.assert_allclose(overall["r"], -1.0)
        # Two recordings per group are too few for r
        assert set(frame["group"]) == {"all", "dementia"}

    def test_group_curves_relative_to_reference(self, cohort, sweeps):
        curves = iv_sweep_group_curves(cohort, sweeps)
        reference = curves[curves["group"] == "non_intervention"]
        np.testing.assert_allclose(reference["percent_of_reference"], 100.0)
        control = curves[(curves["group"] == "without_dementia") & (curves["delta"] == 1)]
        assert control["mean_iv"].iloc[0] == pytest.approx(0.25)
        assert control["percent_of_reference"].iloc[0] == pytest.approx(100.0 * 0.25 / 0.65)

    def test_no_sweeps(self, cohort):
        assert iv_sweep_group_curves(cohort, {}).empty
