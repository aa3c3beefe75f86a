"""Trace CSV and percentile document I/O."""

from collections.abc import Iterable, Iterator
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from colopack.exceptions import FleetParseError, InvalidCapacityError
from colopack.models.common import RESOURCE_FIELDS, ResourceVector
from colopack.models.telemetry import TRACE_COLUMNS, PercentileDocument, UsageSample
from colopack.utils.documents import read_model, write_json


def empty_trace() -> pd.DataFrame:
    frame = pd.DataFrame({column: pd.Series(dtype=float) for column in TRACE_COLUMNS})
    return frame.astype({"task_id": str})


def check_trace_frame(frame: pd.DataFrame) -> None:
    """
    Validate the columns and quantities of a trace frame.

    Raises:
        FleetParseError: Wrong columns or non-numeric values
        InvalidCapacityError: Negative or non-finite usage
    """
    if list(frame.columns) != list(TRACE_COLUMNS):
        found = ",".join(map(str, frame.columns))
        raise FleetParseError(f"trace columns must be {','.join(TRACE_COLUMNS)}, got {found}")
    numeric = frame[["timestamp", *RESOURCE_FIELDS]]
    if not all(pd.api.types.is_numeric_dtype(dtype) for dtype in numeric.dtypes):
        raise FleetParseError("trace timestamp and usage columns must be numeric")
    values = numeric.to_numpy(dtype=float)
    if not np.isfinite(values).all():
        raise InvalidCapacityError("trace contains non-finite values")
    if (values[:, 1:] < 0).any():
        raise InvalidCapacityError("trace contains negative usage")


def load_trace(path: Path) -> pd.DataFrame:
    """
    Read a trace CSV with the exact header
    ``task_id,timestamp,cpu_cores,memory_gb,membw_gbps,netbw_gbps``.

    Raises:
        FleetParseError: Unreadable file, wrong header or malformed rows
    """
    try:
        frame = pd.read_csv(path, dtype={"task_id": str})
    except FileNotFoundError as e:
        raise FleetParseError(f"trace file not found: {path}", path=str(path)) from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise FleetParseError(f"cannot parse trace {path}: {e}", path=str(path)) from e
    check_trace_frame(frame)
    logger.debug("Trace loaded", path=str(path), rows=len(frame))
    return frame


def save_trace(frame: pd.DataFrame, path: Path) -> Path:
    """Write a trace CSV in the standard column order."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    frame.loc[:, list(TRACE_COLUMNS)].to_csv(target, index=False, float_format="%.6f")
    return target


def samples_to_frame(samples: Iterable[UsageSample]) -> pd.DataFrame:
    """Collect samples into a trace frame, keeping input order."""
    rows = [(s.task_id, s.timestamp, *s.usage.as_tuple()) for s in samples]
    if not rows:
        return empty_trace()
    return pd.DataFrame.from_records(rows, columns=list(TRACE_COLUMNS))


def frame_to_samples(frame: pd.DataFrame) -> Iterator[UsageSample]:
    """Stream the rows of a trace frame as samples."""
    for task_id, timestamp, *usage in frame.loc[:, list(TRACE_COLUMNS)].itertuples(
        index=False, name=None
    ):
        yield UsageSample(
            task_id=str(task_id),
            timestamp=float(timestamp),
            usage=ResourceVector.from_sequence(usage),
        )


def save_limits(document: PercentileDocument, path: Path) -> Path:
    return write_json(path, document)


def load_limits(path: Path) -> PercentileDocument:
    return read_model(path, PercentileDocument)


def save_trace_chunks(chunks: Iterable[pd.DataFrame], path: Path) -> Path:
    """
    Write a trace CSV from consecutive frames without holding the whole trace.

    Returns:
        Path: The written path; an empty trace still gets its header
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    written = False
    for chunk in chunks:
        chunk.loc[:, list(TRACE_COLUMNS)].to_csv(
            target,
            index=False,
            float_format="%.6f",
            mode="a" if written else "w",
            header=not written,
        )
        written = True
    if not written:
        empty_trace().to_csv(target, index=False)
    return target
