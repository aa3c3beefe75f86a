"""K-means with k-means++ seeding, WCSS curves and elbow selection."""

import warnings

import numpy as np
from loguru import logger
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from colopack.config import settings
from colopack.exceptions import ClusteringError
from colopack.models.clustering import ClusterModel, FeatureRow


def rows_matrix(rows: list[FeatureRow]) -> np.ndarray:
    return np.array([row.features for row in rows], dtype=float).reshape(len(rows), 3)


def kmeans(rows: list[FeatureRow], k: int, seed: int | None = None) -> ClusterModel:
    """
    Cluster feature rows.

    Lloyd iterations from ``kmeans_n_init`` k-means++ starts drawn from one
    seeded generator; the start with the lowest WCSS is kept. Empty clusters
    are re-seeded at the points farthest from their centroids.

    Args:
        rows: Non-empty rows; their order is part of the determinism contract
        k: Number of clusters, 1 <= k <= len(rows)
        seed: k-means++ seed; ``settings.seed`` when omitted

    Returns:
        ClusterModel: Centroids, labels and WCSS

    Raises:
        ClusteringError: No rows, or k out of range
    """
    if not rows:
        raise ClusteringError("cannot cluster an empty set of rows")
    if not 1 <= k <= len(rows):
        raise ClusteringError(f"k must be in [1, {len(rows)}], got {k}")
    seed = settings.seed if seed is None else seed

    X = rows_matrix(rows)
    estimator = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=settings.kmeans_n_init,
        max_iter=settings.kmeans_max_iter,
        tol=settings.kmeans_tol,
        random_state=seed,
    )
    with warnings.catch_warnings():
        # fewer distinct points than k
        warnings.simplefilter("ignore", ConvergenceWarning)
        estimator.fit(X)
    return ClusterModel(
        k=k,
        seed=seed,
        centroids=[tuple(float(v) for v in c) for c in estimator.cluster_centers_],
        labels={row.task_id: int(label) for row, label in zip(rows, estimator.labels_)},
        wcss=max(0.0, float(estimator.inertia_)),
        iterations=int(estimator.n_iter_),
    )


def recompute_wcss(rows: list[FeatureRow], model: ClusterModel) -> float:
    """Sum of squared distances of every row to its own centroid."""
    centroids = np.array(model.centroids, dtype=float)
    X = rows_matrix(rows)
    labels = np.array([model.labels[row.task_id] for row in rows], dtype=int)
    return float(((X - centroids[labels]) ** 2).sum())


def wcss_curve(
    rows: list[FeatureRow], k_max: int, seed: int | None = None
) -> list[tuple[int, float]]:
    """
    WCSS for k = 1..k_max, each fitted with the same seed.

    Raises:
        ClusteringError: As :func:`kmeans`
    """
    if not rows:
        raise ClusteringError("cannot cluster an empty set of rows")
    if not 1 <= k_max <= len(rows):
        raise ClusteringError(f"k_max must be in [1, {len(rows)}], got {k_max}")
    curve = [(k, kmeans(rows, k, seed).wcss) for k in range(1, k_max + 1)]
    logger.debug("WCSS curve computed", k_max=k_max, rows=len(rows))
    return curve


def pick_elbow(curve: list[tuple[int, float]]) -> int:
    """
    Geometric elbow of a WCSS curve.

    Picks the interior k farthest from the straight line joining the first and
    last points; near-ties resolve to the smaller k.

    Raises:
        ClusteringError: Fewer than three points, or k not ascending
    """
    if len(curve) < 3:
        raise ClusteringError(f"elbow needs at least 3 curve points, got {len(curve)}")
    ks = np.array([float(k) for k, _ in curve])
    ws = np.array([float(w) for _, w in curve])
    if np.any(np.diff(ks) <= 0):
        raise ClusteringError("curve k values must be strictly ascending")

    x1, y1, x2, y2 = ks[0], ws[0], ks[-1], ws[-1]
    length = float(np.hypot(x2 - x1, y2 - y1))
    distances = np.abs((y2 - y1) * ks - (x2 - x1) * ws + x2 * y1 - y2 * x1) / length
    interior = distances[1:-1]
    best = float(interior.max())
    tolerance = 1e-9 * max(1.0, abs(y1), abs(y2))
    index = int(np.flatnonzero(interior >= best - tolerance)[0]) + 1
    return int(curve[index][0])
