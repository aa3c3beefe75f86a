"""Gaussian blobs with known labels, for checking the clustering stage."""

import numpy as np

from colopack.exceptions import GeneratorError
from colopack.models.clustering import FeatureRow

CENTER_SPACING = 12.0
SIGMA = 1.0


def blob_centers(k: int) -> np.ndarray:
    """Centers at least ``CENTER_SPACING`` apart along the first axis."""
    index = np.arange(k)
    return CENTER_SPACING * np.column_stack((index, (index * 7) % 3, (index * 5) % 2)).astype(float)


def blobs(k: int, n: int, seed: int = 0) -> tuple[list[FeatureRow], dict[str, int]]:
    """
    Draw ``n`` points around ``k`` well-separated centers.

    Point ``j`` belongs to blob ``j % k``, so every blob gets a point when n >= k.

    Returns:
        Feature rows in id order and the true blob of each row

    Raises:
        GeneratorError: k < 1 or n < k
    """
    if k < 1 or n < k:
        raise GeneratorError(f"blobs need k >= 1 and n >= k, got k={k} n={n}")
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % k
    points = blob_centers(k)[labels] + rng.normal(0.0, SIGMA, size=(n, 3))
    rows = [
        FeatureRow(task_id=f"blob-{j:05d}", features=tuple(float(v) for v in points[j]))
        for j in range(n)
    ]
    return rows, {row.task_id: int(label) for row, label in zip(rows, labels, strict=True)}
