"""Partitioning, hierarchical merging, and internal validity scores."""

import numpy as np
import pytest

from clustercast.cluster import (
    LINKAGES,
    ClusterAssignment,
    agglomerative,
    dunn,
    euclidean_matrix,
    gamma_index,
    kmeans,
    select_k,
    silhouette,
)
from clustercast.distance import DistanceMatrix
from clustercast.errors import EmptyMatrix, KTooLarge, SingleCluster


def blobs(k=3, per=20, spread=0.3, seed=0, dim=2, gap=10.0):
    rng = np.random.default_rng(seed)
    rows, truth = [], []
    for i in range(k):
        center = np.zeros(dim)
        center[i % dim] = gap * (1 + i)
        rows.append(rng.normal(0, spread, size=(per, dim)) + center)
        truth.extend([i] * per)
    return np.vstack(rows), np.array(truth)


def agree(labels, truth):
    """Partition equality up to renaming."""
    mapping = {}
    for a, b in zip(labels, truth):
        if a in mapping and mapping[a] != b:
            return False
        mapping[a] = b
    return len(set(mapping.values())) == len(mapping)


class TestKMeans:
    def test_recovers_separated_blobs(self):
        rows, truth = blobs(k=3, seed=1)
        got = kmeans(rows, 3, seed=0)
        assert got.k == 3
        assert agree(got.labels, truth)

    def test_labels_are_canonical_first_appearance(self):
        rows, _ = blobs(k=3, seed=2)
        got = kmeans(rows, 3, seed=5)
        assert got.labels[0] == 0
        seen = []
        for lab in got.labels:
            if lab not in seen:
                seen.append(lab)
        assert seen == sorted(seen)

    def test_centers_match_labels_after_reordering(self):
        rows, _ = blobs(k=3, seed=3)
        got = kmeans(rows, 3, seed=0)
        for j in range(3):
            members = rows[got.labels == j]
            assert np.allclose(got.centers[j], members.mean(axis=0), atol=1e-8)

    def test_wcss_history_is_non_increasing(self):
        rows, _ = blobs(k=4, per=30, spread=2.5, seed=4)
        got = kmeans(rows, 4, seed=0)
        hist = got.wcss_history
        assert len(hist) >= 1
        for a, b in zip(hist, hist[1:]):
            assert b <= a + 1e-9

    def test_same_seed_is_deterministic(self):
        rows, _ = blobs(k=3, spread=2.0, seed=5)
        a = kmeans(rows, 3, seed=7)
        b = kmeans(rows, 3, seed=7)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.centers, b.centers)
        assert a.inertia == b.inertia

    def test_isolated_point_gets_its_own_cluster(self):
        rng = np.random.default_rng(6)
        rows = np.vstack(
            [rng.normal(0, 0.1, (10, 2)), rng.normal(8, 0.1, (10, 2)), [[100.0, 100.0]]]
        )
        got = kmeans(rows, 3, seed=0)
        assert got.labels[-1] not in got.labels[:-1]

    def test_k_larger_than_points_rejected(self):
        with pytest.raises(KTooLarge):
            kmeans(np.zeros((3, 2)), 4)

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyMatrix):
            kmeans(np.zeros((0, 2)), 1)

    def test_bad_iteration_counts_rejected(self):
        rows, _ = blobs()
        with pytest.raises(ValueError):
            kmeans(rows, 2, max_iter=0)
        with pytest.raises(ValueError):
            kmeans(rows, 2, n_init=0)

    def test_inertia_is_final_wcss(self):
        rows, _ = blobs(k=2, seed=7)
        got = kmeans(rows, 2, seed=1)
        d = rows - got.centers[got.labels]
        assert got.inertia == pytest.approx(np.sum(d * d), rel=1e-10)


class TestAgglomerative:
    def small_matrix(self):
        # four points on a line: 0, 1, 10, 11
        pts = np.array([[0.0], [1.0], [10.0], [11.0]])
        return euclidean_matrix(pts)

    def test_obvious_two_clusters(self):
        got = agglomerative(self.small_matrix(), 2)
        assert agree(got.labels, [0, 0, 1, 1])
        assert got.method.startswith("agglomerative")

    def test_all_linkages_available(self):
        m = self.small_matrix()
        for linkage in LINKAGES:
            got = agglomerative(m, 2, linkage=linkage)
            assert agree(got.labels, [0, 0, 1, 1])

    def test_single_vs_complete_on_a_chain(self):
        # chain of points 0,2,4,...,18 plus a far pair; single linkage keeps
        # the chain whole, complete linkage splits it.
        chain = np.arange(0.0, 20.0, 2.0)[:, None]
        pair = np.array([[50.0], [52.0]])
        m = euclidean_matrix(np.vstack([chain, pair]))
        single = agglomerative(m, 2, linkage="single")
        assert agree(single.labels, [0] * 10 + [1] * 2)
        complete = agglomerative(m, 3, linkage="complete")
        assert len(set(complete.labels[:10])) == 2  # chain split in two

    def test_average_linkage_hand_traced(self):
        # points 0, 1, 3.5: merge {0,1} first (d=1); then average linkage
        # distance from {0,1} to {3.5} is (3.5 + 2.5)/2 = 3.0
        m = euclidean_matrix(np.array([[0.0], [1.0], [3.5]]))
        got = agglomerative(m, 2, linkage="average")
        assert agree(got.labels, [0, 0, 1])

    def test_k_one_and_k_n(self):
        m = self.small_matrix()
        assert set(agglomerative(m, 1).labels) == {0}
        assert sorted(agglomerative(m, 4).labels) == [0, 1, 2, 3]

    def test_accepts_distance_matrix_wrapper(self):
        dm = DistanceMatrix(self.small_matrix(), metric="euclidean")
        got = agglomerative(dm, 2)
        assert got.k == 2

    def test_bad_linkage_rejected(self):
        with pytest.raises(Exception):
            agglomerative(self.small_matrix(), 2, linkage="ward")

    def test_k_larger_than_points_rejected(self):
        with pytest.raises(KTooLarge):
            agglomerative(self.small_matrix(), 5)


class TestValidityScores:
    def separated(self):
        rows, truth = blobs(k=3, per=10, spread=0.1, seed=8)
        return euclidean_matrix(rows), truth

    def test_silhouette_high_for_separation(self):
        d, truth = self.separated()
        assert silhouette(d, truth) > 0.9

    def test_silhouette_poor_for_random_split(self):
        d, truth = self.separated()
        rng = np.random.default_rng(9)
        assert silhouette(d, rng.permutation(truth)) < 0.3

    def test_singletons_contribute_zero(self):
        d = euclidean_matrix(np.array([[0.0], [10.0]]))
        assert silhouette(d, np.array([0, 1])) == 0.0

    def test_single_cluster_rejected(self):
        d, truth = self.separated()
        with pytest.raises(SingleCluster):
            silhouette(d, np.zeros_like(truth))
        with pytest.raises(SingleCluster):
            dunn(d, np.zeros_like(truth))

    def test_dunn_prefers_separation(self):
        d, truth = self.separated()
        rng = np.random.default_rng(10)
        assert dunn(d, truth) > dunn(d, rng.permutation(truth))

    def test_dunn_infinite_when_clusters_are_points(self):
        d = euclidean_matrix(np.array([[0.0], [0.0], [5.0], [5.0]]))
        assert dunn(d, np.array([0, 0, 1, 1])) == np.inf

    def test_gamma_perfect_separation_is_one(self):
        d, truth = self.separated()
        assert gamma_index(d, truth) == pytest.approx(1.0)

    def test_gamma_subsample_is_seed_deterministic(self):
        rows, truth = blobs(k=2, per=40, spread=3.0, seed=11)
        d = euclidean_matrix(rows)
        a = gamma_index(d, truth, max_pairs=500, seed=3)
        b = gamma_index(d, truth, max_pairs=500, seed=3)
        c = gamma_index(d, truth, max_pairs=500, seed=4)
        assert a == b
        assert -1.0 <= a <= 1.0
        assert -1.0 <= c <= 1.0

    def test_empty_matrix_rejected(self):
        with pytest.raises(EmptyMatrix):
            silhouette(np.zeros((0, 0)), np.array([]))


class TestSelectK:
    def test_recovers_three_blobs_with_kmeans(self):
        rows, truth = blobs(k=3, per=15, spread=0.2, seed=12)
        sel = select_k(rows, k_range=range(2, 7), method="kmeans", seed=0)
        assert sel.k == 3
        assert agree(sel.assignment.labels, truth)
        assert set(sel.table) == set(range(2, 7))
        for row in sel.table.values():
            assert {"silhouette", "dunn", "gamma"} <= set(row)

    def test_recovers_two_blobs_with_agglomerative(self):
        rows, truth = blobs(k=2, per=15, spread=0.2, seed=13)
        sel = select_k(
            euclidean_matrix(rows), k_range=range(2, 6), method="agglomerative"
        )
        assert sel.k == 2
        assert agree(sel.assignment.labels, truth)

    def test_silhouette_tie_prefers_smaller_k(self):
        # two well-separated points: every k gives silhouette 0 (singletons),
        # so the tie must resolve to the smallest k in range
        rows = np.array([[0.0, 0.0], [10.0, 10.0], [20.0, 0.0]])
        sel = select_k(rows, k_range=range(2, 4), method="kmeans", seed=0)
        assert sel.k == 2

    def test_unknown_method_rejected(self):
        rows, _ = blobs()
        with pytest.raises(Exception):
            select_k(rows, method="spectral")


class TestAssignmentContainer:
    def test_labels_must_cover_range(self):
        with pytest.raises(ValueError):
            ClusterAssignment(labels=np.array([0, 2, 2]), k=3, method="kmeans")

    def test_sizes_and_members(self):
        ca = ClusterAssignment(labels=np.array([0, 1, 0, 2, 1, 0]), k=3, method="x")
        assert ca.sizes().tolist() == [3, 2, 1]
        assert ca.members(0).tolist() == [0, 2, 5]
        assert ca.members(2).tolist() == [3]


def test_euclidean_matrix_against_direct_loops():
    rng = np.random.default_rng(14)
    rows = rng.normal(size=(7, 3))
    m = euclidean_matrix(rows)
    for i in range(7):
        for j in range(7):
            want = np.sqrt(np.sum((rows[i] - rows[j]) ** 2))
            assert m[i, j] == pytest.approx(want, abs=1e-10)
    assert np.array_equal(m, m.T)
    assert np.array_equal(np.diag(m), np.zeros(7))
