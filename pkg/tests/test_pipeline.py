"""
End-to-end tests: the metric pipeline and the command line.
"""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from conftest import daily_cosine
from actimetry.cli import cli
from actimetry.schemas.config import RunConfig, load_run_config
from actimetry.schemas.report import EXIT_FATAL, EXIT_OK, EXIT_PARTIAL
from actimetry.services.pipeline import analyze_recording, run_pipeline
from actimetry.services.synth import build_recipe, synthesize_cohort

FAST_FLAGS = ["--sweep-stop", "30", "--sweep-step", "3"]


@pytest.fixture(scope="module")
def cohort_dir(tmp_path_factory):
    """Four three-day recordings at 60 s, two per group"""
    directory = tmp_path_factory.mktemp("cohort")
    synthesize_cohort(build_recipe("control-vs-dementia", seed=7, days=3, count=2, sample_interval=60.0), directory)
    return directory


@pytest.fixture
def runner():
    return CliRunner()


class TestAnalyzeRecording:
    """Per-recording metric collection"""

    def test_failed_metric_is_recorded_not_raised(self, recording_factory, rng):
        values = np.clip(daily_cosine(1, 60.0, mesor=2.0) + 0.2 * rng.standard_normal(1440), 0, None)
        analysis = analyze_recording(recording_factory(values), RunConfig(sweep_stop=10))
        metrics = analysis.metrics

        assert metrics.pov_fundamental is None
        assert metrics.metric_errors["pov"].startswith("DurationError")
        assert metrics.is_value is not None
        assert metrics.iv is not None
        assert metrics.retained_days == 1

    def test_curves_can_be_skipped(self, recording_factory, rng):
        analysis = analyze_recording(
            recording_factory(rng.uniform(0, 1, 2 * 1440)),
            RunConfig(),
            include_sweep=False,
            include_curves=False,
        )
        assert analysis.sweep is None
        assert analysis.spectrum is None
        assert analysis.dfa_curves is None
        assert analysis.metrics.alpha is not None


class TestPipeline:
    """Cohort assembly"""

    def test_report_contents(self, cohort_dir):
        result = run_pipeline(RunConfig(inputs=[cohort_dir], sweep_stop=30, sweep_step=3))
        report = result.report

        assert report.exit_code == EXIT_OK
        assert [r.subject_id for r in report.recordings] == [
            "non_intervention_001",
            "non_intervention_002",
            "without_dementia_001",
            "without_dementia_002",
        ]
        assert {"all", "dementia", "non_intervention", "without_dementia"} <= set(report.summaries)
        assert any(t.group_a == "dementia" and t.group_b == "without_dementia" for t in report.group_tests)
        assert "all" in report.correlations
        assert set(result.sweep_correlations["delta"]) == set(range(1, 31, 3))
        assert "dementia" in result.group_profiles

    def test_worker_count_does_not_change_report(self, cohort_dir):
        config = RunConfig(inputs=[cohort_dir], sweep_stop=12)
        serial = run_pipeline(config).report
        parallel = run_pipeline(config, workers=2).report
        assert serial.model_dump() == parallel.model_dump()


class TestRunCommand:
    """actimetry run"""

    def test_writes_artifacts(self, runner, cohort_dir, tmp_path):
        out = tmp_path / "out"
        result = runner.invoke(cli, ["run", str(cohort_dir), "--output-dir", str(out), *FAST_FLAGS])

        assert result.exit_code == EXIT_OK, result.output
        for name in ("report.json", "metrics.csv", "errors.csv", "timing.csv", "config.txt", "iv_sweep_correlations.csv"):
            assert (out / name).is_file()
        assert (out / "iv_sweep" / "without_dementia_001.csv").is_file()
        assert (out / "dfa" / "without_dementia_001.csv").is_file()
        assert len(pd.read_csv(out / "metrics.csv")) == 4
        assert pd.read_csv(out / "errors.csv").empty

    def test_report_is_byte_identical_across_runs(self, runner, cohort_dir, tmp_path):
        first, second = tmp_path / "a", tmp_path / "b"
        runner.invoke(cli, ["run", str(cohort_dir), "--output-dir", str(first), *FAST_FLAGS])
        runner.invoke(cli, ["run", str(cohort_dir), "--output-dir", str(second), "--workers", "2", *FAST_FLAGS])
        assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()
        assert (first / "metrics.csv").read_bytes() == (second / "metrics.csv").read_bytes()

    def test_config_file_reproduces_hash(self, runner, cohort_dir, tmp_path):
        out = tmp_path / "out"
        runner.invoke(cli, ["run", str(cohort_dir), "--output-dir", str(out), "--k-max", "3", *FAST_FLAGS])
        report = json.loads((out / "report.json").read_text(encoding="utf-8"))
        reloaded = load_run_config(out / "config.txt")
        assert reloaded.k_max == 3
        assert reloaded.config_hash == report["config_hash"]
        assert report["hash_excluded_fields"] == ["output_dir", "workers"]
        assert "workers" not in report["config"]

    def test_partial_failure(self, runner, cohort_dir, tmp_path):
        broken = tmp_path / "broken.csv"
        broken.write_text("timestamp,steps\n2024-01-01T00:00:00+00:00,3\n", encoding="utf-8")
        out = tmp_path / "out"
        result = runner.invoke(cli, ["run", str(cohort_dir), str(broken), "--output-dir", str(out), *FAST_FLAGS])

        assert result.exit_code == EXIT_PARTIAL
        errors = pd.read_csv(out / "errors.csv")
        assert errors["source"].tolist() == ["broken.csv"]
        assert errors["error_type"].iloc[0] == "InputValidationError"

    def test_no_recordings(self, runner, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(cli, ["run", str(empty), "--output-dir", str(tmp_path / "out")])
        assert result.exit_code == EXIT_FATAL
        assert "no recordings found" in result.output

    def test_every_recording_fails(self, runner, tmp_path):
        broken = tmp_path / "broken.csv"
        broken.write_text("timestamp,enmo\n", encoding="utf-8")
        result = runner.invoke(cli, ["run", str(broken), "--output-dir", str(tmp_path / "out")])
        assert result.exit_code == EXIT_FATAL

    def test_unknown_config_key(self, runner, cohort_dir, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("iv_window=3\n", encoding="utf-8")
        result = runner.invoke(cli, ["run", str(cohort_dir), "--config", str(config)])
        assert result.exit_code == EXIT_FATAL
        assert "iv_window" in result.output


class TestOtherCommands:
    """synth, sweep and spectrum"""

    def test_synth_preset(self, runner, tmp_path):
        result = runner.invoke(cli, ["synth", "pure-sine", "--output-dir", str(tmp_path), "--days", "2", "--sample-interval", "60"])
        assert result.exit_code == EXIT_OK, result.output
        assert (tmp_path / "pure_sine_001.csv").is_file()
        assert (tmp_path / "pure_sine_001.meta").is_file()

    def test_synth_takes_seed_from_config(self, runner, tmp_path):
        config = tmp_path / "run.conf"
        config.write_text("seed=11\n", encoding="utf-8")
        flags = ["--days", "1", "--sample-interval", "60"]
        runner.invoke(cli, ["synth", "white-noise", "--config", str(config), "--output-dir", str(tmp_path / "a"), *flags])
        runner.invoke(cli, ["synth", "white-noise", "--config", str(config), "--seed", "12", "--output-dir", str(tmp_path / "b"), *flags])

        (expected,) = synthesize_cohort(
            build_recipe("white-noise", seed=11, days=1, sample_interval=60.0), tmp_path / "expected"
        )
        from_config = tmp_path / "a" / expected.name
        overridden = tmp_path / "b" / expected.name
        assert from_config.read_bytes() == expected.read_bytes()
        assert overridden.read_bytes() != expected.read_bytes()

    def test_synth_needs_exactly_one_source(self, runner, tmp_path):
        result = runner.invoke(cli, ["synth", "--output-dir", str(tmp_path)])
        assert result.exit_code == EXIT_FATAL

    def test_synth_unknown_preset(self, runner, tmp_path):
        result = runner.invoke(cli, ["synth", "brown-noise", "--output-dir", str(tmp_path)])
        assert result.exit_code == EXIT_FATAL

    def test_sweep_to_file(self, runner, cohort_dir, tmp_path):
        output = tmp_path / "sweep.csv"
        result = runner.invoke(cli, ["sweep", str(cohort_dir / "without_dementia_001.csv"), "--sweep-stop", "5", "--output", str(output)])
        assert result.exit_code == EXIT_OK
        frame = pd.read_csv(output)
        assert list(frame.columns) == ["delta", "interval_seconds", "iv"]
        assert frame["delta"].tolist() == [1, 2, 3, 4, 5]
        assert frame["interval_seconds"].iloc[-1] == 300.0

    def test_spectrum_to_file(self, runner, cohort_dir, tmp_path):
        output = tmp_path / "spectrum.csv"
        result = runner.invoke(cli, ["spectrum", str(cohort_dir / "non_intervention_001.csv"), "--output", str(output)])
        assert result.exit_code == EXIT_OK
        frame = pd.read_csv(output)
        assert list(frame.columns) == ["frequency_hz", "power_density", "percent_variance"]
        assert frame["frequency_hz"].max() <= 5.0 / 86400
