"""Fleet-level workload characterization: per-type clustering, naming and profiles."""

from collections import defaultdict

import numpy as np
from loguru import logger

from colopack.clustering.features import build_features, destandardize
from colopack.clustering.kmeans import kmeans, pick_elbow, wcss_curve
from colopack.config import settings
from colopack.exceptions import ClusteringError, MissingProfileError
from colopack.models.clustering import (
    ClusterModel,
    ClusterReport,
    ClusterSummary,
    FleetClustering,
)
from colopack.models.fleet import Fleet, TaskProfile
from colopack.models.sensitivity import SensitivityProfile

JOINT_GROUP = "all"

# Cluster names by ascending centroid magnitude
LEVEL_NAMES: dict[int, tuple[str, ...]] = {
    1: ("medium",),
    2: ("low", "high"),
    3: ("low", "medium", "high"),
}


def name_clusters(model: ClusterModel) -> ClusterModel:
    """
    Name clusters by the sum of their standardized centroid coordinates.

    k <= 3 uses low/medium/high style names; larger k uses ``c<rank>``.
    """
    magnitude = [sum(c) for c in model.centroids]
    order = sorted(range(model.k), key=lambda i: (magnitude[i], i))
    levels = LEVEL_NAMES.get(model.k, tuple(f"c{rank}" for rank in range(model.k)))
    names = [""] * model.k
    for rank, index in enumerate(order):
        names[index] = levels[rank]
    return model.model_copy(update={"names": names})


def group_tasks(fleet: Fleet, by_type: bool = True) -> dict[str, list[TaskProfile]]:
    """Split tasks by the umbrella type of their current host, or keep them together."""
    groups: dict[str, list[TaskProfile]] = defaultdict(list)
    for task in sorted(fleet.tasks, key=lambda t: t.id):
        if by_type:
            key = fleet.arch_of(fleet.assignment[task.id]).server_type.value
        else:
            key = JOINT_GROUP
        groups[key].append(task)
    return dict(sorted(groups.items()))


def cluster_fleet(
    fleet: Fleet, k: int | None = None, seed: int | None = None, by_type: bool = True
) -> FleetClustering:
    """
    Cluster the fleet's tasks on percentile usage features.

    Groups smaller than k are clustered with k equal to their size.

    Args:
        fleet: Fleet whose tasks carry percentile limits
        k: Clusters per group; ``settings.k`` when omitted
        seed: k-means++ seed; ``settings.seed`` when omitted
        by_type: Cluster each umbrella type separately

    Returns:
        FleetClustering: Named models and standardization stats per group
    """
    k = settings.k if k is None else k
    seed = settings.seed if seed is None else seed
    if k < 1:
        raise ClusteringError(f"k must be at least 1, got {k}")

    models: dict[str, ClusterModel] = {}
    stats = {}
    for group, tasks in group_tasks(fleet, by_type).items():
        rows, standardization = build_features(tasks)
        model = name_clusters(kmeans(rows, min(k, len(rows)), seed))
        models[group] = model
        stats[group] = standardization
        logger.info(
            "Clustered workload group",
            group=group,
            tasks=len(rows),
            k=model.k,
            wcss=round(model.wcss, 6),
        )
    return FleetClustering(by_type=by_type, models=models, standardization=stats)


def attach_profiles(
    model: ClusterModel, profiles: dict[str, SensitivityProfile]
) -> dict[str, SensitivityProfile]:
    """
    Give every task its cluster's sensitivity profile.

    Raises:
        MissingProfileError: A populated cluster has no profile
    """
    populated = sorted(set(model.labels.values()))
    for index in populated:
        name = model.name_of(index)
        if name not in profiles:
            raise MissingProfileError(f"no sensitivity profile for cluster '{name}'", cluster=name)
    return {
        task_id: profiles[model.name_of(index)]
        for task_id, index in sorted(model.labels.items())
    }


def apply_clusters(
    fleet: Fleet,
    clustering: FleetClustering,
    profiles: dict[str, SensitivityProfile] | None = None,
) -> Fleet:
    """
    Record cluster labels, and optionally attached profiles, on the fleet's tasks.

    A task that carries its own measured profile and has never been clustered
    keeps that profile.
    """
    labels = clustering.labels()
    attached: dict[str, SensitivityProfile] = {}
    if profiles is not None:
        for group in sorted(clustering.models):
            attached.update(attach_profiles(clustering.models[group], profiles))

    tasks = []
    for task in fleet.tasks:
        update: dict[str, object] = {}
        if task.id in labels:
            update["cluster"] = labels[task.id]
        measured = task.base_sensitivity is not None and task.cluster is None
        if task.id in attached and not measured:
            update["base_sensitivity"] = attached[task.id]
        tasks.append(task.model_copy(update=update) if update else task)
    return fleet.with_tasks(tasks)


def cluster_report(
    fleet: Fleet, clustering: FleetClustering, k_max: int | None = None
) -> ClusterReport:
    """
    Summarize a clustering with centroids in original units.

    Args:
        fleet: The clustered fleet
        clustering: Result of :func:`cluster_fleet`
        k_max: When given, also record each group's WCSS curve up to k_max
            and its elbow

    Returns:
        ClusterReport: Per-group cluster sizes, centroids and labels
    """
    groups: dict[str, list[ClusterSummary]] = {}
    curves: dict[str, list[tuple[int, float]]] = {}
    elbows: dict[str, int] = {}
    seed = settings.seed
    member_groups = group_tasks(fleet, clustering.by_type)
    for group, model in sorted(clustering.models.items()):
        seed = model.seed
        sizes = np.bincount(list(model.labels.values()), minlength=model.k)
        stats = clustering.standardization[group]
        summaries = [
            ClusterSummary(
                name=model.name_of(i),
                size=int(sizes[i]),
                centroid=tuple(destandardize(model.centroids[i], stats)),
            )
            for i in range(model.k)
        ]
        groups[group] = sorted(summaries, key=lambda s: s.name)
        if k_max is not None:
            rows, _ = build_features(member_groups.get(group, []))
            curve = wcss_curve(rows, min(k_max, len(rows)), model.seed)
            curves[group] = curve
            if len(curve) >= 3:
                elbows[group] = pick_elbow(curve)

    k = max((m.k for m in clustering.models.values()), default=0)
    return ClusterReport(
        k=k,
        seed=seed,
        groups=groups,
        labels=clustering.labels(),
        wcss={group: model.wcss for group, model in sorted(clustering.models.items())},
        wcss_curve=curves,
        elbow=elbows,
    )
