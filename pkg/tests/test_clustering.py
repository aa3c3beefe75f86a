"""Tests for feature extraction, k-means and workload characterization."""

import numpy as np
import pytest

from colopack.clustering import (
    apply_clusters,
    attach_profiles,
    build_features,
    cluster_fleet,
    cluster_report,
    kmeans,
    name_clusters,
    pick_elbow,
    raw_features,
    recompute_wcss,
    standardize,
    wcss_curve,
)
from colopack.config import settings
from colopack.exceptions import ClusteringError, MissingPercentileError, MissingProfileError
from colopack.models import ClusterModel, FeatureRow, SensitivityProfile, ServerType


def _rows(points):
    return [FeatureRow(task_id=f"t{i:02d}", features=tuple(p)) for i, p in enumerate(points)]


def _model(centroids, labels=None):
    return ClusterModel(
        k=len(centroids),
        seed=0,
        centroids=centroids,
        labels=labels or {f"t{i}": i for i in range(len(centroids))},
        wcss=0.0,
    )


PROFILES = {
    "low": SensitivityProfile(base_arch="Small", cpu=0.3, membw=0.3, netbw=0.3),
    "medium": SensitivityProfile(base_arch="Small", cpu=0.5, membw=0.5, netbw=0.5),
    "high": SensitivityProfile(base_arch="Small", cpu=0.9, membw=0.9, netbw=0.9),
}


class TestFeatures:
    """Test feature extraction and standardization."""

    def test_raw_features(self, make_task):
        """Test that features are (cpu, memory, netbw) percentiles sorted by task id."""
        tasks = [make_task("b", 4, 8, p99=(2, 3)), make_task("a", 4, 8, p99=(1, 1))]

        rows = raw_features(tasks)

        assert [r.task_id for r in rows] == ["a", "b"]
        assert rows[1].features == (2.0, 3.0, 0.0)

    def test_missing_percentile(self, make_task):
        """Test that tasks need percentile limits."""
        with pytest.raises(MissingPercentileError):
            raw_features([make_task("a", 1, 1)])

    def test_standardize(self):
        """Test zero mean and unit spread."""
        rows, stats = standardize(_rows([(1, 10, 5), (3, 30, 5)]))

        assert stats.mean == (2.0, 20.0, 5.0)
        assert stats.std == (1.0, 10.0, 1.0)
        assert rows[0].features == (-1.0, -1.0, 0.0)

    def test_standardize_empty(self):
        """Test that no rows give identity statistics."""
        rows, stats = standardize([])
        assert rows == []
        assert stats.std == (1.0, 1.0, 1.0)

    def test_build_features(self, make_task):
        """Test extraction followed by z-scoring."""
        rows, _ = build_features(
            [make_task("a", 4, 8, p99=(1, 2)), make_task("b", 4, 8, p99=(3, 6))]
        )
        assert rows[0].features[0] == pytest.approx(-1.0)


class TestKMeans:
    """Test the k-means core."""

    def test_single_cluster(self):
        """Test that k=1 gives the mean and the total variance."""
        points = np.array([(0, 0, 0), (2, 0, 0), (0, 4, 0), (2, 4, 6)], dtype=float)

        model = kmeans(_rows(points), 1, seed=0)

        assert model.centroids[0] == pytest.approx(tuple(points.mean(axis=0)))
        assert model.wcss == pytest.approx(len(points) * points.var(axis=0).sum())

    def test_one_cluster_per_point(self):
        """Test that k=n leaves no within-cluster spread."""
        model = kmeans(_rows([(0, 0, 0), (1, 0, 0), (5, 5, 5)]), 3, seed=1)
        assert model.wcss == pytest.approx(0.0, abs=1e-12)
        assert len(set(model.labels.values())) == 3

    def test_deterministic(self):
        """Test that the same seed reproduces labels and centroids."""
        rng = np.random.default_rng(0)
        rows = _rows(rng.normal(size=(40, 3)))

        first = kmeans(rows, 4, seed=11)
        second = kmeans(rows, 4, seed=11)

        assert first == second

    def test_separated_groups(self):
        """Test that well-separated groups are recovered."""
        rows = _rows([(0, 0, 0), (0.1, 0, 0), (10, 10, 10), (10.1, 10, 10)])

        model = kmeans(rows, 2, seed=0)

        assert model.labels["t00"] == model.labels["t01"]
        assert model.labels["t02"] == model.labels["t03"]
        assert model.labels["t00"] != model.labels["t02"]

    def test_recompute_wcss(self):
        """Test that the stored WCSS matches a recomputation."""
        rng = np.random.default_rng(5)
        rows = _rows(rng.uniform(size=(25, 3)))

        model = kmeans(rows, 3, seed=2)

        assert recompute_wcss(rows, model) == pytest.approx(model.wcss)

    def test_empty_rows(self):
        """Test that clustering needs rows."""
        with pytest.raises(ClusteringError):
            kmeans([], 1)

    @pytest.mark.parametrize("k", [0, 4])
    def test_k_out_of_range(self, k):
        """Test that k must lie in [1, n]."""
        with pytest.raises(ClusteringError):
            kmeans(_rows([(0, 0, 0), (1, 1, 1), (2, 2, 2)]), k)

    def test_duplicate_points(self):
        """Test that more clusters than distinct points still labels every row at zero WCSS."""
        rows = _rows([(1, 1, 1)] * 4)

        model = kmeans(rows, 2, seed=0)

        assert set(model.labels) == {row.task_id for row in rows}
        assert set(model.labels.values()) <= {0, 1}
        assert model.wcss == pytest.approx(0.0, abs=1e-12)

    def test_more_starts_never_raise_wcss(self, monkeypatch):
        """Test that extra k-means++ starts keep a result at least as good as the first."""
        rows = _rows(np.random.default_rng(3).normal(size=(60, 3)))

        monkeypatch.setattr(settings, "kmeans_n_init", 1)
        single = kmeans(rows, 5, seed=9)
        monkeypatch.setattr(settings, "kmeans_n_init", 6)
        several = kmeans(rows, 5, seed=9)

        assert several.wcss <= single.wcss + 1e-9

    def test_iteration_cap(self, monkeypatch):
        """Test that Lloyd iterations stop at the configured cap."""
        rows = _rows(np.random.default_rng(4).normal(size=(80, 3)))
        monkeypatch.setattr(settings, "kmeans_max_iter", 2)

        model = kmeans(rows, 6, seed=1)

        assert 1 <= model.iterations <= 2
        assert recompute_wcss(rows, model) == pytest.approx(model.wcss, rel=1e-6)


class TestElbow:
    """Test WCSS curves and elbow selection."""

    def test_sharp_elbow(self):
        """Test a curve with an obvious bend at k=2."""
        assert pick_elbow([(1, 100.0), (2, 10.0), (3, 9.0), (4, 8.5)]) == 2

    def test_linear_curve_prefers_smaller_k(self):
        """Test that ties resolve to the smaller k."""
        assert pick_elbow([(1, 3.0), (2, 2.0), (3, 1.0)]) == 2

    def test_too_few_points(self):
        """Test that an elbow needs three points."""
        with pytest.raises(ClusteringError):
            pick_elbow([(1, 10.0), (2, 5.0)])

    def test_k_not_ascending(self):
        """Test that curve k values must ascend."""
        with pytest.raises(ClusteringError):
            pick_elbow([(1, 10.0), (3, 5.0), (2, 4.0)])

    def test_curve_shape(self):
        """Test the curve covers 1..k_max and ends at zero for k=n."""
        rows = _rows([(0, 0, 0), (1, 0, 0), (0, 1, 0), (5, 5, 5)])

        curve = wcss_curve(rows, 4, seed=0)

        assert [k for k, _ in curve] == [1, 2, 3, 4]
        assert curve[-1][1] == pytest.approx(0.0, abs=1e-12)

    def test_curve_k_max_range(self):
        """Test that k_max cannot exceed the row count."""
        with pytest.raises(ClusteringError):
            wcss_curve(_rows([(0, 0, 0)]), 2)


class TestNaming:
    """Test cluster naming and profile attachment."""

    def test_three_levels(self):
        """Test low/medium/high by centroid magnitude."""
        model = name_clusters(_model([(1.0, 1.0, 1.0), (-1.0, -1.0, -1.0), (0.0, 0.0, 0.0)]))
        assert model.names == ["high", "low", "medium"]

    def test_two_levels(self):
        """Test that two clusters are named low and high."""
        model = name_clusters(_model([(2.0, 0.0, 0.0), (-2.0, 0.0, 0.0)]))
        assert model.names == ["high", "low"]

    def test_single_level(self):
        """Test that a single cluster is medium."""
        assert name_clusters(_model([(0.0, 0.0, 0.0)])).names == ["medium"]

    def test_many_levels(self):
        """Test rank names beyond three clusters."""
        model = name_clusters(_model([(3.0, 0, 0), (0.0, 0, 0), (2.0, 0, 0), (1.0, 0, 0)]))
        assert model.names == ["c3", "c0", "c2", "c1"]

    def test_attach_profiles(self):
        """Test that tasks inherit their cluster's profile."""
        model = name_clusters(_model([(1.0, 1.0, 1.0), (-1.0, -1.0, -1.0)]))

        attached = attach_profiles(model, PROFILES)

        assert attached["t0"] == PROFILES["high"]
        assert attached["t1"] == PROFILES["low"]

    def test_attach_missing_profile(self):
        """Test that a populated cluster needs a profile."""
        model = name_clusters(_model([(0.0, 0.0, 0.0)]))
        with pytest.raises(MissingProfileError):
            attach_profiles(model, {"low": PROFILES["low"]})


class TestClusterFleet:
    """Test fleet-level clustering."""

    @pytest.fixture
    def mixed_fleet(self, make_arch, make_fleet, make_task):
        """Three Type I and three Type II tasks with distinct percentile usage."""
        archs = [make_arch("Small"), make_arch("Big", server_type=ServerType.TYPE_II)]
        tasks = [
            make_task(f"s{i}", 1, 1, p99=(0.1 * (i + 1), 0.2 * (i + 1))) for i in range(3)
        ] + [make_task(f"b{i}", 1, 1, p99=(0.3 * (i + 1), 0.1 * (i + 1))) for i in range(3)]
        assignment = {f"s{i}": "hs" for i in range(3)} | {f"b{i}": "hb" for i in range(3)}
        return make_fleet({"hs": "Small", "hb": "Big"}, tasks, assignment, archs=archs)

    def test_groups_by_type(self, mixed_fleet):
        """Test that each umbrella type is clustered separately."""
        clustering = cluster_fleet(mixed_fleet, k=3, seed=0, by_type=True)

        assert sorted(clustering.models) == ["TypeI", "TypeII"]
        assert clustering.labels()["s0"] == "low"
        assert clustering.labels()["s2"] == "high"

    def test_joint(self, mixed_fleet):
        """Test the joint clustering group."""
        clustering = cluster_fleet(mixed_fleet, k=2, seed=0, by_type=False)
        assert list(clustering.models) == ["all"]
        assert len(clustering.labels()) == 6

    def test_k_capped_by_group_size(self, mixed_fleet):
        """Test that groups smaller than k use k equal to their size."""
        clustering = cluster_fleet(mixed_fleet, k=5, seed=0)
        assert all(model.k == 3 for model in clustering.models.values())

    def test_invalid_k(self, mixed_fleet):
        """Test that k must be positive."""
        with pytest.raises(ClusteringError):
            cluster_fleet(mixed_fleet, k=0)

    def test_apply_clusters(self, mixed_fleet):
        """Test that labels and profiles land on the tasks."""
        clustering = cluster_fleet(mixed_fleet, k=3, seed=0)

        fleet = apply_clusters(mixed_fleet, clustering, PROFILES)

        assert fleet.task("s0").cluster == "low"
        assert fleet.task("s0").base_sensitivity == PROFILES["low"]

    def test_apply_keeps_measured_profile(self, make_fleet, make_task):
        """Test that a measured profile of an unclustered task is kept."""
        task = make_task("t1", 1, 1, p99=(1, 1), sensitivity=("Small", 0.7, 0.7, 0.7))
        fleet = make_fleet({"h1": "Small"}, [task], {"t1": "h1"})

        clustered = apply_clusters(fleet, cluster_fleet(fleet, k=1, seed=0), PROFILES)

        assert clustered.task("t1").cluster == "medium"
        assert clustered.task("t1").base_sensitivity.cpu == 0.7

    def test_report(self, mixed_fleet):
        """Test cluster sizes, original-unit centroids and elbows."""
        clustering = cluster_fleet(mixed_fleet, k=3, seed=0)

        report = cluster_report(mixed_fleet, clustering, k_max=3)

        assert report.k == 3
        assert sum(s.size for s in report.groups["TypeI"]) == 3
        high = next(s for s in report.groups["TypeI"] if s.name == "high")
        assert high.centroid[0] == pytest.approx(0.3)
        assert [k for k, _ in report.wcss_curve["TypeII"]] == [1, 2, 3]
        assert report.elbow["TypeI"] == 2
