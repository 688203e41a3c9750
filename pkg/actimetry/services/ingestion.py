"""Recording files: CSV samples plus a ``key=value`` sidecar.

CSV layout, header required, one row per sample::

    timestamp,x,y,z          (triaxial g, converted to ENMO on load)
    timestamp,enmo

Timestamps are ISO-8601 with a UTC offset. Rows separated by more than
1.5 sampling intervals open a gap; empty cells are missing samples too.
The sidecar ``<stem>.meta`` supplies ``subject_id``, ``group`` and
``sample_interval``.
"""

from datetime import datetime, timezone
from pathlib import Path
from typing import IO

import numpy as np
import pandas as pd
import structlog

from actimetry.core.exceptions import InputValidationError, UploadTooLargeError
from actimetry.models.recording import GapRange, Provenance, Recording
from actimetry.services.core_series import enmo_from_triaxial

logger = structlog.get_logger(__name__)

METADATA_SUFFIX = ".meta"
METADATA_KEYS = {"subject_id", "group", "sample_interval"}
GAP_FACTOR = 1.5

_OFFSET_PATTERN = r"(Z|[+-]\d{2}:?\d{2})$"


# ========== Metadata ==========


def metadata_path_for(csv_path: Path) -> Path:
    return csv_path.with_suffix(METADATA_SUFFIX)


def read_metadata(path: Path) -> dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment."""
    entries: dict[str, str] = {}
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InputValidationError(f"{path}:{number}: expected key=value")
        key = key.strip()
        if key not in METADATA_KEYS:
            raise InputValidationError(f"{path}:{number}: unknown metadata key {key!r}")
        entries[key] = value.strip()
    return entries


def write_metadata(path: Path, subject_id: str, group: str, sample_interval: float) -> None:
    path.write_text(
        f"subject_id={subject_id}\ngroup={group}\nsample_interval={sample_interval:g}\n",
        encoding="utf-8",
    )


# ========== Loading ==========


def _sample_columns(frame: pd.DataFrame, path: str) -> list[str]:
    columns = [str(c).strip().lower() for c in frame.columns]
    frame.columns = columns
    if columns[:1] != ["timestamp"]:
        raise InputValidationError(f"{path}: header must start with 'timestamp'")
    if columns[1:] == ["enmo"]:
        return ["enmo"]
    if columns[1:] == ["x", "y", "z"]:
        return ["x", "y", "z"]
    raise InputValidationError(f"{path}: expected columns timestamp,enmo or timestamp,x,y,z")


def _grid_positions(instants: pd.Series, sample_interval: float, path: str) -> np.ndarray:
    elapsed = (instants - instants.iloc[0]).dt.total_seconds().to_numpy()
    steps = np.diff(elapsed)
    if np.any(steps <= 0):
        raise InputValidationError(f"{path}: timestamps must be strictly increasing")
    positions = np.rint(elapsed / sample_interval).astype(np.int64)
    # Jitter below the gap threshold must not move two rows onto one grid slot
    jumps = np.diff(positions)
    irregular = (jumps < 1) | ((jumps > 1) & (steps <= GAP_FACTOR * sample_interval))
    if np.any(irregular):
        raise InputValidationError(f"{path}: sampling is not regular at row {int(np.argmax(irregular)) + 2}")
    return positions


def _gap_ranges(missing: np.ndarray) -> tuple[GapRange, ...]:
    padded = np.concatenate([[False], missing, [False]])
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    return tuple(GapRange(int(start), int(stop)) for start, stop in zip(edges[::2], edges[1::2]))


def load_recording(csv_path: Path | str, metadata_path: Path | str | None = None) -> Recording:
    """Read one recording file and its sidecar.

    Args:
        csv_path: Sample file
        metadata_path: Sidecar file; defaults to ``<stem>.meta`` next to the CSV

    Returns:
        Recording holding ENMO samples on a uniform grid, NaN in gaps

    Raises:
        InputValidationError: On malformed files or irregular sampling
    """
    csv_path = Path(csv_path)
    metadata_path = Path(metadata_path) if metadata_path else metadata_path_for(csv_path)
    metadata = read_metadata(metadata_path) if metadata_path.exists() else {}
    metadata.setdefault("subject_id", csv_path.stem)
    return read_recording(csv_path, metadata, source=str(csv_path))


def read_recording(
    buffer: Path | str | IO,
    metadata: dict[str, str],
    source: str = "<upload>",
    max_rows: int | None = None,
) -> Recording:
    """Parse CSV samples from a path or file object and convert triaxial rows to ENMO.

    Raises:
        InputValidationError: On malformed content or irregular sampling
        UploadTooLargeError: If the file holds more than ``max_rows`` rows
    """
    try:
        frame = pd.read_csv(buffer, dtype={"timestamp": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputValidationError(f"{source}: {exc}") from exc
    if frame.empty:
        raise InputValidationError(f"{source}: no samples")
    if max_rows is not None and len(frame) > max_rows:
        raise UploadTooLargeError(f"{source}: {len(frame)} rows exceed the limit of {max_rows}")
    value_columns = _sample_columns(frame, source)

    stamps = frame["timestamp"].astype(str).str.strip()
    offsets = stamps.str.extract(_OFFSET_PATTERN, expand=False)
    if offsets.isna().any():
        raise InputValidationError(f"{source}: every timestamp needs a UTC offset")
    try:
        instants = pd.to_datetime(stamps, format="ISO8601", utc=True)
    except (ValueError, TypeError) as exc:
        raise InputValidationError(f"{source}: unparsable timestamp ({exc})") from exc

    warnings: list[str] = []
    if offsets.nunique() > 1:
        # Clock stays on the first offset for the whole recording
        warnings.append(f"UTC offset changes within recording: {sorted(offsets.unique())}")
        logger.warning("offset_change", source=source, offsets=sorted(offsets.unique()))

    if metadata.get("sample_interval"):
        try:
            sample_interval = float(metadata["sample_interval"])
        except ValueError as exc:
            raise InputValidationError(f"{source}: sample_interval is not a number") from exc
    else:
        sample_interval = float(instants.diff().dt.total_seconds().median()) if len(instants) > 1 else float("nan")
        warnings.append(f"sample_interval inferred as {sample_interval:g} s")
    if not sample_interval > 0:
        raise InputValidationError(f"{source}: sample_interval must be positive")

    positions = _grid_positions(instants, sample_interval, source)
    values = frame[value_columns].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)

    grid = np.full((int(positions[-1]) + 1, len(value_columns)), np.nan)
    grid[positions] = values
    if len(value_columns) == 3:
        samples = enmo_from_triaxial(grid)
    else:
        samples = grid[:, 0]
    missing = np.isnan(samples)

    start_time = pd.Timestamp(stamps.iloc[0]).to_pydatetime()
    recording = Recording(
        subject_id=metadata.get("subject_id") or Path(source).stem,
        group=metadata.get("group") or "unlabelled",
        start_time=start_time,
        sample_interval=sample_interval,
        samples=samples,
        gaps=_gap_ranges(missing),
        provenance=Provenance(source=source, warnings=tuple(warnings)),
    )
    logger.info(
        "recording_loaded",
        subject_id=recording.subject_id,
        rows=len(frame),
        grid=recording.n,
        gaps=len(recording.gaps),
        triaxial=len(value_columns) == 3,
    )
    return recording


def discover_recordings(paths: list[Path]) -> list[Path]:
    """Expand directories into their ``*.csv`` files, sorted by name."""
    found: list[Path] = []
    for path in paths:
        path = Path(path)
        if path.is_dir():
            found.extend(sorted(path.glob("*.csv")))
        elif path.suffix.lower() == ".csv":
            found.append(path)
    return sorted(set(found))


# ========== Writing ==========


def _format_offset(start_time: datetime) -> str:
    delta = start_time.utcoffset()
    if delta is None:
        raise InputValidationError("start_time must carry a UTC offset")
    minutes = int(delta.total_seconds() // 60)
    sign = "+" if minutes >= 0 else "-"
    return f"{sign}{abs(minutes) // 60:02d}:{abs(minutes) % 60:02d}"


def format_timestamps(start_time: datetime, sample_interval: float, n: int) -> pd.Index:
    """ISO-8601 wall-clock stamps with the start time's fixed UTC offset."""
    naive_start = start_time.replace(tzinfo=None)
    index = pd.date_range(naive_start, periods=n, freq=pd.Timedelta(seconds=sample_interval))
    pattern = "%Y-%m-%dT%H:%M:%S" if float(sample_interval).is_integer() else "%Y-%m-%dT%H:%M:%S.%f"
    return index.strftime(pattern) + _format_offset(start_time)


def write_recording(
    directory: Path,
    subject_id: str,
    group: str,
    start_time: datetime,
    sample_interval: float,
    values: np.ndarray,
) -> Path:
    """Write ``<subject_id>.csv`` (ENMO or triaxial, by shape) plus its sidecar."""
    directory.mkdir(parents=True, exist_ok=True)
    values = np.asarray(values, dtype=float)
    if start_time.tzinfo is None:
        start_time = start_time.replace(tzinfo=timezone.utc)

    frame = pd.DataFrame({"timestamp": format_timestamps(start_time, sample_interval, values.shape[0])})
    if values.ndim == 2:
        frame[["x", "y", "z"]] = values
    else:
        frame["enmo"] = values

    csv_path = directory / f"{subject_id}.csv"
    frame.to_csv(csv_path, index=False, float_format="%.10g", lineterminator="\n")
    write_metadata(metadata_path_for(csv_path), subject_id, group, sample_interval)
    return csv_path
