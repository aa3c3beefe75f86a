"""Minute aggregation of raw usage samples.

Buckets are ``[t, t + width)`` aligned to the epoch; each output sample is the
arithmetic mean of its bucket and carries the bucket start as timestamp.
Buckets without samples produce nothing.
"""

import math
from collections.abc import Iterable, Iterator

import numpy as np
import pandas as pd

from colopack.config import settings
from colopack.exceptions import OutOfOrderSampleError
from colopack.models.common import RESOURCE_FIELDS, ResourceVector
from colopack.models.telemetry import UsageSample
from colopack.telemetry.io import check_trace_frame


class _Bucket:
    __slots__ = ("start", "sums", "count")

    def __init__(self, start: float) -> None:
        self.start = start
        self.sums = [0.0, 0.0, 0.0, 0.0]
        self.count = 0

    def add(self, usage: ResourceVector) -> None:
        for i, value in enumerate(usage.as_tuple()):
            self.sums[i] += value
        self.count += 1

    def mean(self, task_id: str) -> UsageSample:
        return UsageSample(
            task_id=task_id,
            timestamp=self.start,
            usage=ResourceVector.from_sequence([s / self.count for s in self.sums]),
        )


def bucket_start(timestamp: float, width: int) -> float:
    return float(math.floor(timestamp / width) * width)


def aggregate_minutes(
    samples: Iterable[UsageSample], bucket_seconds: int | None = None
) -> Iterator[UsageSample]:
    """
    Average a stream of samples into per-task minute buckets.

    Tasks may be interleaved. A task's bucket is emitted as soon as a sample
    of the same task falls into a later bucket; remaining buckets are flushed
    in task-id order when the stream ends.

    Args:
        samples: Raw samples, timestamps non-decreasing per task
        bucket_seconds: Bucket width; ``settings.minute_seconds`` when omitted

    Yields:
        UsageSample: One mean sample per (task, bucket)

    Raises:
        OutOfOrderSampleError: A task's timestamp decreases
    """
    width = bucket_seconds or settings.minute_seconds
    last_seen: dict[str, float] = {}
    open_buckets: dict[str, _Bucket] = {}

    for offset, sample in enumerate(samples):
        previous = last_seen.get(sample.task_id)
        if previous is not None and sample.timestamp < previous:
            raise OutOfOrderSampleError(sample.task_id, offset)
        last_seen[sample.task_id] = sample.timestamp

        start = bucket_start(sample.timestamp, width)
        bucket = open_buckets.get(sample.task_id)
        if bucket is not None and bucket.start != start:
            yield bucket.mean(sample.task_id)
            bucket = None
        if bucket is None:
            bucket = open_buckets[sample.task_id] = _Bucket(start)
        bucket.add(sample.usage)

    for task_id in sorted(open_buckets):
        yield open_buckets[task_id].mean(task_id)


def check_order(frame: pd.DataFrame) -> None:
    """
    Verify per-task timestamps never decrease, in row order.

    Raises:
        OutOfOrderSampleError: Naming the first offending task and row offset
    """
    if frame.empty:
        return
    steps = frame.groupby("task_id", sort=False)["timestamp"].diff()
    backwards = np.flatnonzero((steps < 0).to_numpy())
    if backwards.size:
        offset = int(backwards[0])
        raise OutOfOrderSampleError(str(frame["task_id"].iloc[offset]), offset)


def aggregate_frame(frame: pd.DataFrame, bucket_seconds: int | None = None) -> pd.DataFrame:
    """
    Vectorized counterpart of :func:`aggregate_minutes` for whole traces.

    Args:
        frame: Trace with the standard columns
        bucket_seconds: Bucket width; ``settings.minute_seconds`` when omitted

    Returns:
        pd.DataFrame: Minute means sorted by (task_id, timestamp)
    """
    check_trace_frame(frame)
    check_order(frame)
    width = bucket_seconds or settings.minute_seconds
    buckets = np.floor(frame["timestamp"].to_numpy(dtype=float) / width) * width
    grouped = (
        frame.assign(timestamp=buckets.astype(np.int64))
        .groupby(["task_id", "timestamp"], sort=True)[list(RESOURCE_FIELDS)]
        .mean()
        .reset_index()
    )
    return grouped
