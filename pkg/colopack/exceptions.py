"""
Custom exceptions for every failure the pipeline can report.

All exceptions inherit from ColopackError and carry a stable machine-parsable
``code`` plus a human-readable message. The CLI turns them into a single
``error=<code> message=<text>`` line and a non-zero exit status.
"""

from typing import Any


class ColopackError(Exception):
    """
    Base exception for all colopack errors.

    Provides the code/message pair used by the error formatter. All specific
    error types should inherit from this base class.
    """

    code: str = "internal_error"
    exit_status: int = 1

    def __init__(self, message: str, **context: Any):
        """
        Initialize colopack exception.

        Args:
            message: Human-readable error message
            **context: Structured details attached for logging
        """
        super().__init__(message)
        self.message = message
        self.context = context


class FleetParseError(ColopackError):
    """Fleet, profile or run-configuration document does not parse or validate."""

    code = "parse_error"
    exit_status = 2


class DanglingReferenceError(ColopackError):
    """A task, host or profile references an id that does not exist."""

    code = "dangling_reference"
    exit_status = 2

    def __init__(self, kind: str, owner: str, target: str):
        """
        Initialize DanglingReferenceError.

        Args:
            kind: Reference kind (e.g. "task->host", "host->arch")
            owner: Id of the object holding the reference
            target: Id that failed to resolve
        """
        super().__init__(f"{kind} reference from '{owner}' to unknown '{target}'")
        self.kind = kind
        self.owner = owner
        self.target = target


class DuplicateIdError(ColopackError):
    """The same identifier appears twice within one collection."""

    code = "duplicate_id"
    exit_status = 2

    def __init__(self, collection: str, identifier: str):
        super().__init__(f"duplicate id '{identifier}' in {collection}")
        self.collection = collection
        self.identifier = identifier


class InvalidCapacityError(ColopackError):
    """A resource quantity is negative, non-finite, or zero where it must be positive."""

    code = "invalid_capacity"
    exit_status = 2


class OutOfOrderSampleError(ColopackError):
    """Usage samples of one task go backwards in time."""

    code = "out_of_order_sample"
    exit_status = 3

    def __init__(self, task_id: str, offset: int):
        """
        Initialize OutOfOrderSampleError.

        Args:
            task_id: Task whose samples are out of order
            offset: Zero-based position of the offending sample in the input
        """
        super().__init__(f"timestamps of task '{task_id}' decrease at offset {offset}")
        self.task_id = task_id
        self.offset = offset


class EmptySeriesError(ColopackError):
    """A percentile was requested over no values."""

    code = "empty_series"
    exit_status = 3


class InvalidPercentileError(ColopackError):
    """Percentile rank outside [1, 100]."""

    code = "invalid_percentile"
    exit_status = 3


class ClusteringError(ColopackError):
    """k out of range, curve too short, or no rows to cluster."""

    code = "clustering_error"
    exit_status = 4


class MissingProfileError(ColopackError):
    """A populated cluster or a task has no sensitivity profile."""

    code = "missing_profile"
    exit_status = 4


class NormalizationError(ColopackError):
    """An architecture has a zero score, core count or bandwidth."""

    code = "normalization_error"
    exit_status = 4


class MissingSensitivityError(ColopackError):
    """A (task, architecture) pair is absent from the sensitivity table."""

    code = "missing_sensitivity"
    exit_status = 4

    def __init__(self, task_id: str, arch: str):
        super().__init__(f"no sensitivity entry for task '{task_id}' on '{arch}'")
        self.task_id = task_id
        self.arch = arch


class MissingPercentileError(ColopackError):
    """A p99-based limit mode was requested for a task without percentile limits."""

    code = "missing_percentile"
    exit_status = 5

    def __init__(self, task_id: str, mode: str):
        super().__init__(f"task '{task_id}' has no percentile limits (mode {mode})")
        self.task_id = task_id
        self.mode = mode


class InfeasibleTaskError(ColopackError):
    """A task fits on no host, or an assignment cannot be made feasible."""

    code = "infeasible"
    exit_status = 5


class InstanceTooLargeError(ColopackError):
    """Instance exceeds the exhaustive oracle's guard."""

    code = "instance_too_large"
    exit_status = 5


class SolverConfigError(ColopackError):
    """Solver configuration is inconsistent (all weights zero, missing table)."""

    code = "solver_config"
    exit_status = 5


class ZeroBaselineCostError(ColopackError):
    """TCO delta requested against a baseline with no occupied hosts."""

    code = "zero_baseline_cost"
    exit_status = 6


class GeneratorError(ColopackError):
    """Synthetic fleet specification is invalid or cannot be placed."""

    code = "generator_error"
    exit_status = 7
