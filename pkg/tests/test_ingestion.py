"""
Tests for reading and writing recording files.
"""

import io
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from conftest import MIDNIGHT
from actimetry.core.exceptions import InputValidationError, UploadTooLargeError
from actimetry.services.ingestion import (
    discover_recordings,
    load_recording,
    read_metadata,
    read_recording,
    write_recording,
)


def _csv(rows: list[str], header: str = "timestamp,enmo") -> str:
    return "\n".join([header, *rows]) + "\n"


class TestRoundTrip:
    """write_recording output loads back unchanged"""

    def test_enmo_file(self, tmp_path, rng):
        values = rng.uniform(0, 1, 500)
        path = write_recording(tmp_path, "p01", "intervention", MIDNIGHT, 60.0, values)
        recording = load_recording(path)

        assert recording.subject_id == "p01"
        assert recording.group == "intervention"
        assert recording.sample_interval == 60.0
        assert recording.start_time == MIDNIGHT
        assert recording.gaps == ()
        np.testing.assert_allclose(recording.samples, values, rtol=1e-9)

    def test_triaxial_file_is_converted(self, tmp_path):
        values = np.tile([[3.0, 0.0, 4.0]], (10, 1))
        path = write_recording(tmp_path, "p02", "without_dementia", MIDNIGHT, 5.0, values)
        recording = load_recording(path)

        assert not recording.is_triaxial
        np.testing.assert_allclose(recording.samples, 4.0)

    def test_local_offset_is_kept(self, tmp_path):
        start = datetime(2024, 3, 4, tzinfo=timezone(timedelta(hours=1)))
        path = write_recording(tmp_path, "p03", "intervention", start, 60.0, np.ones(5))
        recording = load_recording(path)
        assert recording.start_time.utcoffset() == timedelta(hours=1)
        assert recording.start_time.hour == 0


class TestGaps:
    """Missing rows and empty cells become gap ranges"""

    def test_skipped_rows_open_a_gap(self):
        text = _csv(
            [
                "2024-03-04T00:00:00+00:00,0.1",
                "2024-03-04T00:01:00+00:00,0.2",
                "2024-03-04T00:04:00+00:00,0.3",
                "2024-03-04T00:05:00+00:00,0.4",
            ]
        )
        recording = read_recording(io.StringIO(text), {"sample_interval": "60"})
        assert recording.n == 6
        assert [(g.start, g.stop) for g in recording.gaps] == [(2, 4)]
        assert np.isnan(recording.samples[2:4]).all()

    def test_empty_cell_is_missing(self):
        text = _csv(
            [
                "2024-03-04T00:00:00+00:00,0.1",
                "2024-03-04T00:01:00+00:00,",
                "2024-03-04T00:02:00+00:00,0.3",
            ]
        )
        recording = read_recording(io.StringIO(text), {"sample_interval": "60"})
        assert [(g.start, g.stop) for g in recording.gaps] == [(1, 2)]

    def test_interval_is_inferred_without_metadata(self):
        text = _csv([f"2024-03-04T00:00:{s:02d}+00:00,0.1" for s in range(0, 30, 5)])
        recording = read_recording(io.StringIO(text), {})
        assert recording.sample_interval == 5.0
        assert any("inferred" in w for w in recording.provenance.warnings)


class TestValidation:
    """Malformed files are rejected with InputValidationError"""

    def test_missing_offset(self):
        text = _csv(["2024-03-04T00:00:00,0.1", "2024-03-04T00:01:00,0.2"])
        with pytest.raises(InputValidationError, match="UTC offset"):
            read_recording(io.StringIO(text), {"sample_interval": "60"})

    def test_unknown_columns(self):
        text = _csv(["2024-03-04T00:00:00+00:00,0.1"], header="timestamp,activity")
        with pytest.raises(InputValidationError, match="expected columns"):
            read_recording(io.StringIO(text), {})

    def test_decreasing_timestamps(self):
        text = _csv(["2024-03-04T00:01:00+00:00,0.1", "2024-03-04T00:00:00+00:00,0.2"])
        with pytest.raises(InputValidationError, match="strictly increasing"):
            read_recording(io.StringIO(text), {"sample_interval": "60"})

    def test_negative_enmo(self):
        text = _csv(["2024-03-04T00:00:00+00:00,0.1", "2024-03-04T00:01:00+00:00,-0.2"])
        with pytest.raises(InputValidationError):
            read_recording(io.StringIO(text), {"sample_interval": "60"})

    def test_row_limit(self):
        text = _csv([f"2024-03-04T00:0{m}:00+00:00,0.1" for m in range(5)])
        with pytest.raises(UploadTooLargeError):
            read_recording(io.StringIO(text), {"sample_interval": "60"}, max_rows=4)

    def test_offset_change_is_warned(self):
        text = _csv(
            [
                "2024-03-31T00:59:00+00:00,0.1",
                "2024-03-31T02:00:00+01:00,0.2",
            ]
        )
        recording = read_recording(io.StringIO(text), {"sample_interval": "60"})
        assert recording.n == 2
        assert any("offset changes" in w for w in recording.provenance.warnings)


class TestMetadata:
    """Sidecar files"""

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "x.meta"
        path.write_text("subject_id=a\ncolour=blue\n", encoding="utf-8")
        with pytest.raises(InputValidationError, match="colour"):
            read_metadata(path)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "x.meta"
        path.write_text("# cohort A\n\nsubject_id = a  # first\ngroup=intervention\n", encoding="utf-8")
        assert read_metadata(path) == {"subject_id": "a", "group": "intervention"}

    def test_discover_sorts_and_expands_directories(self, tmp_path):
        for name in ("b", "a"):
            write_recording(tmp_path, name, "g", MIDNIGHT, 60.0, np.ones(3))
        (tmp_path / "notes.txt").write_text("x", encoding="utf-8")
        found = discover_recordings([tmp_path])
        assert [p.name for p in found] == ["a.csv", "b.csv"]
