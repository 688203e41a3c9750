"""
Tests for the HTTP service.
"""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import MIDNIGHT, daily_cosine
from actimetry.config import Settings, get_settings
from actimetry.main import create_app
from actimetry.services.ingestion import write_recording


@pytest.fixture
def app():
    application = create_app()
    yield application
    application.dependency_overrides.clear()


@pytest.fixture
def client(app):
    return TestClient(app)


@pytest.fixture
def upload(tmp_path, rng):
    """Two days of 60 s ENMO as CSV bytes"""
    values = np.clip(daily_cosine(2, 60.0, mesor=1.5) + 0.2 * rng.standard_normal(2 * 1440), 0, None)
    path = write_recording(tmp_path, "u01", "intervention", MIDNIGHT, 60.0, values)
    return path.read_bytes()


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_versioned_health(self, client):
        assert client.get("/api/v1/health").status_code == 200


class TestMetricsEndpoint:
    """POST /api/v1/metrics"""

    def test_computes_metrics(self, client, upload):
        response = client.post(
            "/api/v1/metrics",
            files={"file": ("u01.csv", upload, "text/csv")},
            data={"subject_id": "u01", "group": "intervention", "sample_interval": "60"},
        )
        assert response.status_code == 200, response.text
        body = response.json()
        assert body["subject_id"] == "u01"
        assert body["group"] == "intervention"
        assert body["retained_days"] == 2
        assert 0.0 <= body["is_value"] <= 1.0
        assert body["pov_fundamental"] is not None
        assert body["pov_method"] == "fourier"
        assert "elapsed_seconds" not in body

    def test_interval_is_inferred(self, client, upload):
        response = client.post("/api/v1/metrics", files={"file": ("u01.csv", upload, "text/csv")})
        assert response.status_code == 200
        assert response.json()["sample_interval"] == 60.0

    def test_invalid_file(self, client):
        bad = b"timestamp,steps\n2024-03-04T00:00:00+00:00,1\n"
        response = client.post("/api/v1/metrics", files={"file": ("bad.csv", bad, "text/csv")})
        assert response.status_code == 422
        assert response.json()["error_type"] == "InputValidationError"

    def test_invalid_form_value(self, client, upload):
        response = client.post(
            "/api/v1/metrics",
            files={"file": ("u01.csv", upload, "text/csv")},
            data={"iv_delta": "0"},
        )
        assert response.status_code == 422

    def test_row_limit(self, app, client, upload):
        app.dependency_overrides[get_settings] = lambda: Settings(MAX_UPLOAD_ROWS=100)
        response = client.post("/api/v1/metrics", files={"file": ("u01.csv", upload, "text/csv")})
        assert response.status_code == 413


class TestSweepEndpoint:
    """POST /api/v1/sweep"""

    def test_sweep(self, client, upload):
        response = client.post(
            "/api/v1/sweep",
            files={"file": ("u01.csv", upload, "text/csv")},
            data={"sweep_start": "1", "sweep_stop": "5"},
        )
        assert response.status_code == 200, response.text
        body = response.json()
        assert body["deltas"] == [1, 2, 3, 4, 5]
        assert body["interval_seconds"][-1] == 300.0
        assert len(body["iv"]) == 5

    def test_bad_range(self, client, upload):
        response = client.post(
            "/api/v1/sweep",
            files={"file": ("u01.csv", upload, "text/csv")},
            data={"sweep_start": "10", "sweep_stop": "5"},
        )
        assert response.status_code == 422
        assert response.json()["error_type"] == "ConfigError"
