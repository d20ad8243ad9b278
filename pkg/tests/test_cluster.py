import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from assaysem.cluster import (
    ClusterModel,
    attach_statements,
    elbow_select,
    fit_kmeans,
    semantify,
)
from assaysem.corpus import Statement
from assaysem.errors import ConsistencyError, InvalidArgumentError
from conftest import gaussian_blobs, make_record


def _brute_force_best_2_partition(points):
    """Minimum-inertia split of points into two non-empty groups."""
    best = (float("inf"), None)
    n = len(points)
    for size in range(1, n // 2 + 1):
        for combo in itertools.combinations(range(n), size):
            a = points[list(combo)]
            b = points[[i for i in range(n) if i not in combo]]
            inertia = sum(
                float(np.sum((grp - grp.mean(axis=0)) ** 2)) for grp in (a, b)
            )
            if inertia < best[0]:
                best = (inertia, set(combo))
    return best


class TestFitKmeans:
    def test_toy_two_clusters_match_brute_force(self):
        points = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
        best_inertia, best_group = _brute_force_best_2_partition(points)
        fit = fit_kmeans(points, 2, seed=0)
        groups = {tuple(np.flatnonzero(fit.labels == j)) for j in range(2)}
        assert {frozenset(g) for g in groups} == {
            frozenset(best_group),
            frozenset(set(range(4)) - best_group),
        }
        assert fit.inertia == pytest.approx(best_inertia)
        assert sorted(map(tuple, np.round(fit.centroids, 6).tolist())) == [
            (0.0, 0.5),
            (10.0, 0.5),
        ]

    def test_k_equal_to_distinct_points_gives_zero_inertia(self):
        # 3 distinct points, one duplicated so k < n holds
        points = np.array([[0.0, 0.0], [5.0, 0.0], [0.0, 5.0], [0.0, 5.0]])
        fit = fit_kmeans(points, 3, seed=1)
        assert fit.inertia == pytest.approx(0.0)
        assert len(set(fit.labels[:3])) == 3

    def test_k_not_smaller_than_n_rejected(self):
        points = np.zeros((4, 2))
        for k in (4, 5):
            with pytest.raises(InvalidArgumentError):
                fit_kmeans(points, k, seed=0)

    def test_lloyd_inertia_monotone(self):
        x = gaussian_blobs(n_per_blob=40, seed=11)
        fit = fit_kmeans(x, 5, seed=3)
        hist = fit.inertia_history
        assert all(hist[i + 1] <= hist[i] + 1e-9 for i in range(len(hist) - 1))

    def test_deterministic_for_fixed_seed(self):
        x = gaussian_blobs(seed=5)
        a = fit_kmeans(x, 4, seed=9)
        b = fit_kmeans(x, 4, seed=9)
        assert np.array_equal(a.centroids, b.centroids)
        assert np.array_equal(a.labels, b.labels)
        assert a.inertia == b.inertia

    def test_large_k_remains_valid_no_empty_clusters(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(60, 8))
        fit = fit_kmeans(x, 40, seed=2)
        assert set(fit.labels.tolist()) == set(range(40))


class TestAttachStatements:
    def test_union_of_member_statements(self):
        # both records in one cluster, per the coincident points
        points = np.array([[0.0, 0.0], [0.0, 0.1], [9.0, 9.0]])
        records = [
            make_record("bp", statements=[("s1", "v"), ("s2", "v")]),
            make_record("bq", statements=[("s2", "v"), ("s3", "v")]),
            make_record("far", statements=[("other", "v")]),
        ]
        fit = fit_kmeans(points, 2, seed=0)
        model = attach_statements(fit, records)
        shared = model.assignments["bp"]
        assert model.assignments["bq"] == shared
        freq = model.statement_freq[shared]
        assert set(freq) == {Statement("s1", "v"), Statement("s2", "v"), Statement("s3", "v")}
        assert freq[Statement("s2", "v")] == 2
        assert freq[Statement("s1", "v")] == freq[Statement("s3", "v")] == 1

    def test_singleton_cluster_counts_are_one(self):
        points = np.array([[0.0], [10.0], [20.0]])
        records = [make_record(f"r{i}", statements=[(f"p{i}", "v")]) for i in range(3)]
        model = attach_statements(fit_kmeans(points, 2, seed=0), records)
        for rid, idx in model.assignments.items():
            members = [r for r in records if model.assignments[r.id] == idx]
            for stmt, count in model.statement_freq[idx].items():
                assert count <= len(members)

    def test_shared_statement_counts_cluster_size(self):
        points = np.zeros((4, 2)) + [[0, 0], [0, 0.1], [0.1, 0], [9, 9]]
        shared = ("common", "v")
        records = [make_record(f"r{i}", statements=[shared]) for i in range(4)]
        model = attach_statements(fit_kmeans(points, 2, seed=1), records)
        big = max(range(2), key=lambda j: sum(1 for v in model.assignments.values() if v == j))
        assert model.statement_freq[big][Statement(*shared)] == 3

    def test_record_count_mismatch(self):
        fit = fit_kmeans(np.array([[0.0], [1.0], [5.0]]), 2, seed=0)
        with pytest.raises(ConsistencyError):
            attach_statements(fit, [make_record("only-one")])


def _toy_model():
    points = np.array([[0.0, 0.0], [0.0, 0.2], [0.2, 0.0], [10.0, 10.0]])
    records = [
        make_record("a", statements=[("p1", "v1"), ("p2", "v2")]),
        make_record("b", statements=[("p1", "v1"), ("p3", "v3")]),
        make_record("c", statements=[("p1", "v1")]),
        make_record("d", statements=[("lonely", "v")]),
    ]
    return attach_statements(fit_kmeans(points, 2, seed=0), records), records


class TestSemantify:
    def test_threshold_filters_by_frequency(self):
        model, _ = _toy_model()
        near = np.array([0.05, 0.05])
        assert semantify(model, near, threshold=3).statements == {Statement("p1", "v1")}
        assert semantify(model, near, threshold=1).statements == {
            Statement("p1", "v1"), Statement("p2", "v2"), Statement("p3", "v3"),
        }

    def test_singleton_cluster_threshold_one(self):
        model, records = _toy_model()
        result = semantify(model, np.array([10.0, 10.0]), threshold=1)
        assert result.statements == records[3].statements

    def test_threshold_monotone(self):
        model, _ = _toy_model()
        v = np.array([0.1, 0.1])
        for t in range(1, 5):
            assert semantify(model, v, t + 1).statements <= semantify(model, v, t).statements

    def test_empty_result_is_valid(self):
        points = np.array([[0.0], [0.5], [9.0]])
        records = [make_record(f"r{i}") for i in range(3)]  # no statements at all
        model = attach_statements(fit_kmeans(points, 2, seed=0), records)
        assert semantify(model, np.array([0.2]), 1).statements == frozenset()

    def test_dimension_mismatch(self):
        model, _ = _toy_model()
        with pytest.raises(InvalidArgumentError):
            semantify(model, np.array([1.0, 2.0, 3.0]), 1)

    def test_tie_breaks_to_lowest_cluster_index(self):
        model = ClusterModel(
            k=2,
            centroids=np.array([[1.0, 0.0], [-1.0, 0.0]]),
            assignments={},
            statement_freq=({Statement("left", "v"): 1}, {Statement("right", "v"): 1}),
            seed=0,
            inertia=0.0,
        )
        result = semantify(model, np.array([0.0, 0.0]), 1)
        assert result.cluster_index == 0

    def test_limitation_output_subset_of_training_statements(self):
        model, records = _toy_model()
        training = frozenset().union(*(r.statements for r in records))
        rng = np.random.default_rng(4)
        for _ in range(50):
            v = rng.normal(scale=20.0, size=2)
            assert semantify(model, v, 1).statements <= training

    def test_serialization_roundtrip(self, tmp_path):
        model, _ = _toy_model()
        path = tmp_path / "model.json"
        model.save(path)
        loaded = ClusterModel.load(path)
        assert np.array_equal(loaded.centroids, model.centroids)
        assert loaded.assignments == model.assignments
        assert loaded.statement_freq == model.statement_freq


class TestElbow:
    def test_three_blobs_select_three(self):
        x = gaussian_blobs(n_per_blob=30, spread=0.4, seed=2)
        result = elbow_select(x, list(range(1, 9)), seed=0)
        assert result.selected_k == 3

    def test_curve_non_increasing(self):
        x = gaussian_blobs(n_per_blob=20, seed=8)
        result = elbow_select(x, [1, 2, 3, 4, 5, 6], seed=1)
        eps = 1e-6 * max(result.inertias)
        for a, b in zip(result.inertias, result.inertias[1:]):
            assert b <= a + eps

    def test_too_few_candidates(self):
        with pytest.raises(InvalidArgumentError):
            elbow_select(gaussian_blobs(), [2, 3], seed=0)
