"""Feature extraction and z-score standardization for workload clustering."""

import numpy as np

from colopack.exceptions import MissingPercentileError
from colopack.models.clustering import FeatureRow, Standardization
from colopack.models.fleet import TaskProfile

# membw is scored by sensitivity but not clustered on
FEATURE_FIELDS: tuple[str, str, str] = ("cpu_cores", "memory_gb", "netbw_gbps")


def raw_features(tasks: list[TaskProfile]) -> list[FeatureRow]:
    """
    Percentile usage features of each task, sorted by task id.

    Raises:
        MissingPercentileError: A task has no percentile limits
    """
    rows = []
    for task in sorted(tasks, key=lambda t: t.id):
        if task.p99 is None:
            raise MissingPercentileError(task.id, "clustering")
        rows.append(
            FeatureRow(
                task_id=task.id,
                features=(task.p99.cpu_cores, task.p99.memory_gb, task.p99.netbw_gbps),
            )
        )
    return rows


def standardize(rows: list[FeatureRow]) -> tuple[list[FeatureRow], Standardization]:
    """
    Z-score each feature dimension; constant dimensions keep unit spread.

    Returns:
        Standardized rows and the statistics used
    """
    if not rows:
        return [], Standardization(mean=(0.0, 0.0, 0.0), std=(1.0, 1.0, 1.0))
    X = np.array([row.features for row in rows], dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    Z = (X - mean) / std
    standardized = [
        FeatureRow(task_id=row.task_id, features=(float(z[0]), float(z[1]), float(z[2])))
        for row, z in zip(rows, Z)
    ]
    stats = Standardization(
        mean=(float(mean[0]), float(mean[1]), float(mean[2])),
        std=(float(std[0]), float(std[1]), float(std[2])),
    )
    return standardized, stats


def build_features(tasks: list[TaskProfile]) -> tuple[list[FeatureRow], Standardization]:
    """Standardized percentile features of the tasks, with the stats recorded."""
    return standardize(raw_features(tasks))


def destandardize(vector: tuple[float, float, float], stats: Standardization) -> tuple[float, ...]:
    return tuple(v * s + m for v, s, m in zip(vector, stats.std, stats.mean))
