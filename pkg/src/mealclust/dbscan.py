"""Density-based clustering with a strict epsilon-neighborhood.

Neighborhoods use strict inequality (dist < eps), so two points at
distance exactly eps are NOT neighbors; this diverges from the common
``<=`` convention. Expansion order is deterministic (ascending index),
so identical inputs always yield identical labels.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from mealclust.features import FeatureMatrix
from mealclust.kmeans import _as_array

DEFAULT_MIN_PTS = 5

NOISE = -1
_UNVISITED = -2


@dataclass
class DbscanResult:
    eps: float
    min_pts: int
    labels: np.ndarray  # (N,) cluster id >= 0, or -1 for noise
    n_clusters: int


def _pairwise_distances(data: np.ndarray) -> np.ndarray:
    diff = data[:, None, :] - data[None, :, :]
    return np.sqrt(np.einsum("ijd,ijd->ij", diff, diff))


def eps_neighborhood(p_index: int, m: FeatureMatrix | np.ndarray, eps: float) -> set[int]:
    """Indices strictly closer than eps to point p (p itself included)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    data = _as_array(m)
    diff = data - data[p_index]
    dist = np.sqrt(np.einsum("nd,nd->n", diff, diff))
    return set(np.flatnonzero(dist < eps).tolist())


def dbscan_fit(m: FeatureMatrix | np.ndarray, eps: float, min_pts: int = DEFAULT_MIN_PTS) -> DbscanResult:
    """Classical DBSCAN over an exact O(N^2) distance scan.

    Points are visited in ascending index order and core neighborhoods
    expand through a FIFO seed queue, so border points join the first
    cluster that reaches them.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be at least 1")
    data = _as_array(m)
    n = data.shape[0]
    dist = _pairwise_distances(data)
    neighborhoods = [np.flatnonzero(dist[i] < eps) for i in range(n)]
    core = np.array([len(nb) >= min_pts for nb in neighborhoods])

    labels = np.full(n, _UNVISITED, dtype=int)
    cluster_id = 0
    for i in range(n):
        if labels[i] != _UNVISITED:
            continue
        if not core[i]:
            labels[i] = NOISE
            continue
        labels[i] = cluster_id
        queue = deque(neighborhoods[i])
        while queue:
            q = queue.popleft()
            if labels[q] == NOISE:
                labels[q] = cluster_id  # border point, do not expand
            if labels[q] != _UNVISITED:
                continue
            labels[q] = cluster_id
            if core[q]:
                queue.extend(neighborhoods[q])
        cluster_id += 1

    return DbscanResult(eps=eps, min_pts=min_pts, labels=labels, n_clusters=cluster_id)
