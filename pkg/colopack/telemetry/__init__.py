"""Usage telemetry: minute aggregation, percentiles and trace I/O."""

from colopack.telemetry.aggregate import aggregate_frame, aggregate_minutes
from colopack.telemetry.io import (
    frame_to_samples,
    load_limits,
    load_trace,
    samples_to_frame,
    save_limits,
    save_trace,
    save_trace_chunks,
)
from colopack.telemetry.percentiles import (
    apply_limits,
    compute_limits,
    keep_requested,
    limits_document,
    percentile,
)

__all__ = [
    "aggregate_frame",
    "aggregate_minutes",
    "apply_limits",
    "compute_limits",
    "frame_to_samples",
    "keep_requested",
    "limits_document",
    "load_limits",
    "load_trace",
    "percentile",
    "samples_to_frame",
    "save_limits",
    "save_trace",
    "save_trace_chunks",
]
