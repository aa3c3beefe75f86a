"""Workload characterization by k-means over percentile usage."""

from colopack.clustering.characterize import (
    apply_clusters,
    attach_profiles,
    cluster_fleet,
    cluster_report,
    name_clusters,
)
from colopack.clustering.features import build_features, raw_features, standardize
from colopack.clustering.kmeans import kmeans, pick_elbow, recompute_wcss, wcss_curve

__all__ = [
    "apply_clusters",
    "attach_profiles",
    "build_features",
    "cluster_fleet",
    "cluster_report",
    "kmeans",
    "name_clusters",
    "pick_elbow",
    "raw_features",
    "recompute_wcss",
    "standardize",
    "wcss_curve",
]
