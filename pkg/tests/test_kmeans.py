import numpy as np
import pytest

from mealclust.features import FeatureMatrix
from mealclust.kmeans import assign, euclidean_distance, kmeans_fit


def matrix(data):
    data = np.asarray(data, dtype=float)
    return FeatureMatrix(data=data, feature_names=[f"f{i}" for i in range(data.shape[1])])


def test_distance_3_4_5():
    assert euclidean_distance([0, 0], [3, 4]) == pytest.approx(5.0)


def test_distance_identity():
    assert euclidean_distance([1.5, -2.0], [1.5, -2.0]) == 0.0


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        euclidean_distance([1, 2], [1, 2, 3])


def test_distance_matches_sum_of_squares_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.normal(size=4)
        b = rng.normal(size=4)
        expected = sum((x - y) ** 2 for x, y in zip(a, b)) ** 0.5
        assert abs(euclidean_distance(a, b) - expected) < 1e-12


def test_assign_tie_breaks_to_lowest_index():
    m = matrix([[0.0, 0.0]])
    centroids = np.array([[1.0, 0.0], [-1.0, 0.0]])
    assert assign(m, centroids).tolist() == [0]


def test_assign_coincident_point():
    m = matrix([[5.0, 5.0]])
    centroids = np.array([[0.0, 0.0], [9.0, 9.0], [5.0, 5.0]])
    assert assign(m, centroids).tolist() == [2]


def test_assign_dimension_mismatch():
    with pytest.raises(ValueError):
        assign(matrix([[0.0, 0.0]]), np.array([[1.0, 2.0, 3.0]]))


def test_assign_matches_bruteforce_argmin():
    rng = np.random.default_rng(7)
    m = matrix(rng.normal(size=(80, 3)))
    centroids = rng.normal(size=(5, 3))
    labels = assign(m, centroids)
    for i, point in enumerate(m.data):
        dists = [euclidean_distance(point, c) for c in centroids]
        assert labels[i] == dists.index(min(dists))


def test_k1_closed_form():
    rng = np.random.default_rng(2)
    m = matrix(rng.normal(5, 2, size=(50, 2)))
    model = kmeans_fit(m, k=1, seed=0)
    assert np.abs(model.centroids[0] - m.data.mean(axis=0)).max() < 1e-9
    assert model.inertia == pytest.approx(((m.data - m.data.mean(axis=0)) ** 2).sum())


def test_two_separated_pairs():
    m = matrix([[0, 0], [0, 1], [100, 100], [100, 101]])
    model = kmeans_fit(m, k=2, seed=3)
    got = sorted(model.centroids.tolist())
    assert got == [[0.0, 0.5], [100.0, 100.5]]


def test_planted_gaussians_recovered_over_seeds():
    rng = np.random.default_rng(42)
    centers = np.array([[0.0, 0.0], [25.0, 0.0], [0.0, 25.0], [25.0, 25.0]])
    data = np.vstack([rng.normal(c, 1.0, size=(100, 2)) for c in centers])
    m = matrix(data)
    for seed in range(50):
        model = kmeans_fit(m, k=4, seed=seed)
        matched = set()
        for c in model.centroids:
            dists = np.sqrt(((centers - c) ** 2).sum(axis=1))
            j = int(np.argmin(dists))
            assert dists[j] < 0.5
            matched.add(j)
        assert matched == {0, 1, 2, 3}


def test_k_out_of_range():
    m = matrix([[0, 0], [1, 1]])
    with pytest.raises(ValueError):
        kmeans_fit(m, k=3)
    with pytest.raises(ValueError):
        kmeans_fit(m, k=0)


def test_inertia_monotone_descent():
    rng = np.random.default_rng(5)
    for trial in range(20):
        m = matrix(rng.normal(size=(60, 2)))
        model = kmeans_fit(m, k=4, seed=trial)
        hist = model.inertia_history
        assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))


def test_converged_centroids_are_cluster_means():
    rng = np.random.default_rng(8)
    m = matrix(rng.normal(size=(120, 2)))
    model = kmeans_fit(m, k=3, seed=1)
    for j in range(3):
        members = m.data[model.labels == j]
        assert np.abs(model.centroids[j] - members.mean(axis=0)).max() < 1e-6


def test_k_equals_n_distinct_points_zero_inertia():
    rng = np.random.default_rng(10)
    m = matrix(rng.uniform(0, 10, size=(15, 2)))
    model = kmeans_fit(m, k=15, seed=0)
    assert model.inertia == 0.0


def test_determinism():
    rng = np.random.default_rng(12)
    m = matrix(rng.normal(size=(70, 2)))
    a = kmeans_fit(m, k=5, seed=99)
    b = kmeans_fit(m, k=5, seed=99)
    assert (a.labels == b.labels).all()
    assert (a.centroids == b.centroids).all()


def test_relabeling_leaves_inertia_unchanged():
    rng = np.random.default_rng(13)
    m = matrix(rng.normal(size=(40, 2)))
    model = kmeans_fit(m, k=3, seed=2)
    perm = [2, 0, 1]
    permuted_centroids = model.centroids[perm]
    permuted_labels = assign(m, permuted_centroids)
    inertia = sum(
        euclidean_distance(m.data[i], permuted_centroids[permuted_labels[i]]) ** 2
        for i in range(m.n)
    )
    assert inertia == pytest.approx(model.inertia)
