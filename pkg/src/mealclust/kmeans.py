"""K-Means clustering (Lloyd iterations) minimizing within-cluster
squared Euclidean distance.

Deterministic given (data, k, seed): greedy distance-weighted seeding
from a seeded PCG64 generator, ties in assignment broken toward the
lowest centroid index, empty clusters repaired by resetting their
centroid to the point farthest from its currently assigned centroid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mealclust.features import FeatureMatrix

DEFAULT_MAX_ITER = 300
DEFAULT_TOL = 1e-6


@dataclass
class KMeansModel:
    k: int
    centroids: np.ndarray  # (k, D)
    labels: np.ndarray  # (N,) int
    inertia: float
    inertia_history: list[float]  # one entry per assignment step
    iterations_run: int
    seed: int


def _as_array(m: FeatureMatrix | np.ndarray) -> np.ndarray:
    if isinstance(m, FeatureMatrix):
        return m.data
    return np.asarray(m, dtype=float)


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between two equal-dimension vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def _sq_distances(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, shape (N, k)."""
    diff = data[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def assign(m: FeatureMatrix | np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Nearest-centroid labels; ties go to the lowest centroid index."""
    data = _as_array(m)
    centroids = np.asarray(centroids, dtype=float)
    if data.shape[1] != centroids.shape[1]:
        raise ValueError(
            f"dimension mismatch: data has {data.shape[1]} columns, centroids {centroids.shape[1]}"
        )
    return np.argmin(_sq_distances(data, centroids), axis=1)


def _seed_centroids(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy distance-weighted seeding (k-means++ style)."""
    n = data.shape[0]
    chosen = [int(rng.integers(n))]
    for _ in range(1, k):
        d2 = _sq_distances(data, data[chosen]).min(axis=1)
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # all remaining points coincide with chosen centroids
            idx = int(rng.integers(n))
        chosen.append(idx)
    return data[chosen].copy()


def kmeans_fit(
    m: FeatureMatrix | np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> KMeansModel:
    """Fit K-Means by Lloyd iterations.

    Stops when the maximum centroid displacement drops below `tol` or
    after `max_iter` iterations. Single restart; sweeps vary seeds
    explicitly.
    """
    data = _as_array(m)
    n = data.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if tol < 0:
        raise ValueError("tol must be non-negative")

    rng = np.random.default_rng(seed)
    centroids = _seed_centroids(data, k, rng)

    labels = np.zeros(n, dtype=int)
    inertia = 0.0
    inertia_history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        sq = _sq_distances(data, centroids)
        labels = np.argmin(sq, axis=1)
        inertia = float(sq[np.arange(n), labels].sum())
        inertia_history.append(inertia)

        new_centroids = centroids.copy()
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                new_centroids[j] = data[labels == j].mean(axis=0)
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            # farthest point from its own assigned centroid seeds the repair
            own_dist = sq[np.arange(n), labels]
            order = np.argsort(-own_dist, kind="stable")
            for slot, j in enumerate(empty):
                new_centroids[j] = data[order[slot]]

        displacement = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids
        if displacement < tol:
            break

    # final assignment against the converged centroids
    sq = _sq_distances(data, centroids)
    labels = np.argmin(sq, axis=1)
    inertia = float(sq[np.arange(n), labels].sum())
    inertia_history.append(inertia)

    return KMeansModel(
        k=k,
        centroids=centroids,
        labels=labels,
        inertia=inertia,
        inertia_history=inertia_history,
        iterations_run=iterations,
        seed=seed,
    )
