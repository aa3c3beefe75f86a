"""Telemetry models: usage samples and percentile limits."""

from typing import Annotated

from pydantic import Field

from colopack.models.common import FrozenModel, ResourceVector

TRACE_COLUMNS: tuple[str, ...] = (
    "task_id",
    "timestamp",
    "cpu_cores",
    "memory_gb",
    "membw_gbps",
    "netbw_gbps",
)


class UsageSample(FrozenModel):
    """
    Instantaneous usage of one task.

    Attributes:
        task_id: Task the sample belongs to
        timestamp: Seconds since epoch
        usage: Resource usage at that instant
    """

    task_id: str
    timestamp: Annotated[float, Field(allow_inf_nan=False)]
    usage: ResourceVector


class PercentileLimits(FrozenModel):
    """Per-dimension percentile of a task's usage over the trailing window."""

    task_id: str
    percentile: Annotated[int, Field(ge=1, le=100)]
    limits: ResourceVector
    sample_count: Annotated[int, Field(ge=1)]


class PercentileDocument(FrozenModel):
    """Output document of the percentile stage."""

    percentile: int
    window_seconds: int
    limits: dict[str, PercentileLimits] = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)
