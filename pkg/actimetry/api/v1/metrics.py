"""
Metric endpoints for single uploaded recordings.

Endpoints:
    - POST /api/v1/metrics - every per-recording metric
    - POST /api/v1/sweep - IV over a range of subsampling factors
"""

import io
from typing import Annotated, Literal

from fastapi import APIRouter, File, Form, UploadFile
from fastapi.concurrency import run_in_threadpool
from pydantic import Field

from actimetry.api.dependencies import SettingsDep
from actimetry.models.recording import Recording
from actimetry.schemas.base import FrozenModel
from actimetry.schemas.config import build_run_config
from actimetry.schemas.report import RecordingMetrics
from actimetry.services.circadian import iv_sweep
from actimetry.services.core_series import exclude_missing_days
from actimetry.services.ingestion import read_recording
from actimetry.services.pipeline import analyze_recording

router = APIRouter(tags=["metrics"])


# ============================================================================
# RESPONSE SCHEMAS
# ============================================================================


class SweepResponse(FrozenModel):
    """IV sweep of one uploaded recording"""

    subject_id: str
    sample_interval: float
    deltas: list[int]
    interval_seconds: list[float]
    iv: list[float]
    omitted: dict[int, str] = Field(default_factory=dict, description="Deltas skipped and why")


# ============================================================================
# HELPERS
# ============================================================================


async def _read_upload(
    file: UploadFile,
    subject_id: str | None,
    group: str | None,
    sample_interval: float | None,
    max_rows: int,
) -> Recording:
    content = await file.read()
    metadata = {
        "subject_id": subject_id or "",
        "group": group or "",
        "sample_interval": "" if sample_interval is None else repr(sample_interval),
    }
    source = file.filename or "<upload>"
    return await run_in_threadpool(read_recording, io.BytesIO(content), metadata, source, max_rows)


# ============================================================================
# ENDPOINTS
# ============================================================================


@router.post("/metrics", response_model=RecordingMetrics, summary="Compute all metrics of one recording")
async def compute_metrics(
    settings: SettingsDep,
    file: Annotated[UploadFile, File(description="CSV: timestamp,enmo or timestamp,x,y,z")],
    subject_id: Annotated[str | None, Form()] = None,
    group: Annotated[str | None, Form()] = None,
    sample_interval: Annotated[float | None, Form(gt=0)] = None,
    iv_delta: Annotated[int, Form(ge=1)] = 60,
    k_max: Annotated[int, Form(ge=1)] = 4,
    pov_method: Annotated[Literal["fourier", "trapezoid"], Form()] = "fourier",
) -> RecordingMetrics:
    """
    Exclude incomplete days and compute IS, IV, DFA exponents, PoV and
    the cosinor fit. Metrics that cannot be computed are null and listed
    in ``metric_errors``.
    """
    recording = await _read_upload(file, subject_id, group, sample_interval, settings.MAX_UPLOAD_ROWS)
    config = build_run_config({"iv_delta": iv_delta, "k_max": k_max, "pov_method": pov_method})
    analysis = await run_in_threadpool(
        analyze_recording, recording, config, include_sweep=False, include_curves=False
    )
    return analysis.metrics


@router.post("/sweep", response_model=SweepResponse, summary="IV sweep of one recording")
async def compute_sweep(
    settings: SettingsDep,
    file: Annotated[UploadFile, File(description="CSV: timestamp,enmo or timestamp,x,y,z")],
    subject_id: Annotated[str | None, Form()] = None,
    group: Annotated[str | None, Form()] = None,
    sample_interval: Annotated[float | None, Form(gt=0)] = None,
    sweep_start: Annotated[int, Form(ge=1)] = 1,
    sweep_stop: Annotated[int, Form(ge=1)] = 720,
    sweep_step: Annotated[int, Form(ge=1)] = 1,
) -> SweepResponse:
    recording = await _read_upload(file, subject_id, group, sample_interval, settings.MAX_UPLOAD_ROWS)
    config = build_run_config({"sweep_start": sweep_start, "sweep_stop": sweep_stop, "sweep_step": sweep_step})

    def sweep_recording():
        series = exclude_missing_days(recording).to_series()
        return iv_sweep(series, config.sweep_deltas, workers=settings.WORKERS)

    result = await run_in_threadpool(sweep_recording)
    return SweepResponse(
        subject_id=recording.subject_id,
        sample_interval=result.sample_interval,
        deltas=result.deltas.tolist(),
        interval_seconds=result.interval_seconds.tolist(),
        iv=result.iv_values.tolist(),
        omitted=result.omitted,
    )
