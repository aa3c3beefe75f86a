"""Clustering models: feature rows, fitted k-means models and reports."""

from pydantic import Field

from colopack.models.common import FrozenModel

Vector3 = tuple[float, float, float]


class FeatureRow(FrozenModel):
    """One task's feature vector (cpu, memory, network)."""

    task_id: str
    features: Vector3


class Standardization(FrozenModel):
    """Per-feature mean and standard deviation used for z-scoring."""

    mean: Vector3
    std: Vector3


class ClusterModel(FrozenModel):
    """
    A fitted k-means model.

    Attributes:
        k: Number of clusters
        seed: Seed of the k-means++ initialisation
        centroids: One centroid per cluster, in feature space
        labels: Cluster index of each task
        names: Human-readable name of each cluster index
        wcss: Within-cluster sum of squared distances
        iterations: Lloyd iterations performed
    """

    k: int
    seed: int
    centroids: list[Vector3]
    labels: dict[str, int]
    names: list[str] = Field(default_factory=list)
    wcss: float
    iterations: int = 0

    def name_of(self, index: int) -> str:
        return self.names[index] if self.names else str(index)

    def label_names(self) -> dict[str, str]:
        """Task id to cluster name."""
        return {task_id: self.name_of(index) for task_id, index in sorted(self.labels.items())}


class ClusterSummary(FrozenModel):
    """Size and centroid of one named cluster, in original units."""

    name: str
    size: int
    centroid: Vector3


class ClusterReport(FrozenModel):
    """Output document of the cluster stage."""

    k: int
    seed: int
    groups: dict[str, list[ClusterSummary]] = Field(default_factory=dict)
    labels: dict[str, str] = Field(default_factory=dict)
    wcss: dict[str, float] = Field(default_factory=dict)
    wcss_curve: dict[str, list[tuple[int, float]]] = Field(default_factory=dict)
    elbow: dict[str, int] = Field(default_factory=dict)


class FleetClustering(FrozenModel):
    """K-means models of a fleet, one per clustering group (umbrella type or ``all``)."""

    by_type: bool
    models: dict[str, ClusterModel] = Field(default_factory=dict)
    standardization: dict[str, Standardization] = Field(default_factory=dict)

    def labels(self) -> dict[str, str]:
        """Task id to cluster name across all groups."""
        merged: dict[str, str] = {}
        for group in sorted(self.models):
            merged.update(self.models[group].label_names())
        return dict(sorted(merged.items()))
