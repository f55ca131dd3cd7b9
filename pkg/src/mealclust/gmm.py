"""Gaussian mixture modelling by expectation-maximization.

The mixture density is a weighted sum of full-covariance multivariate
normals. Fits are initialized from a K-Means partition with the same
seed, responsibilities are computed in log-space, and every M-step
floors covariance diagonals to keep components non-singular.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mealclust.features import FeatureMatrix
from mealclust.kmeans import kmeans_fit, _as_array

DEFAULT_MAX_ITER = 200
DEFAULT_TOL = 1e-6
VARIANCE_FLOOR = 1e-6

_LOG_2PI = float(np.log(2.0 * np.pi))


class FitError(RuntimeError):
    """EM fit collapsed numerically."""


@dataclass
class GmmParams:
    weights: np.ndarray  # (g,), in [0,1], sums to 1
    means: np.ndarray  # (g, D)
    covariances: np.ndarray  # (g, D, D), symmetric positive-definite

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        self.means = np.atleast_2d(np.asarray(self.means, dtype=float))
        self.covariances = np.asarray(self.covariances, dtype=float)
        if self.covariances.ndim == 2:
            self.covariances = self.covariances[None, :, :]

    @property
    def g(self) -> int:
        return len(self.weights)

    @property
    def d(self) -> int:
        return self.means.shape[1]

    def validate(self) -> None:
        if abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        if (self.weights < 0).any() or (self.weights > 1).any():
            raise ValueError("mixture weights must lie in [0, 1]")
        for cov in self.covariances:
            if not np.allclose(cov, cov.T):
                raise ValueError("covariance matrices must be symmetric")


@dataclass
class GmmModel:
    params: GmmParams
    labels: np.ndarray  # (N,) hard assignment = argmax responsibility
    log_likelihood: float
    log_likelihood_trace: list[float]
    weights_trace: list[np.ndarray] = field(default_factory=list)  # after each M-step
    iterations_run: int = 0
    seed: int = 0


def _component_log_pdfs(data: np.ndarray, means: np.ndarray, covariances: np.ndarray) -> np.ndarray:
    """Log multivariate-normal density of each row under each component,
    shape (N, g), via batched Cholesky factorizations."""
    d = means.shape[1]
    chol = np.linalg.cholesky(covariances)  # (g, D, D)
    chol_inv = np.linalg.inv(chol)
    log_det = 2.0 * np.log(np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)  # (g,)
    maha = np.empty((data.shape[0], len(means)))
    for k in range(len(means)):
        z = (data - means[k]) @ chol_inv[k].T
        maha[:, k] = (z * z).sum(axis=1)
    return -0.5 * (d * _LOG_2PI + log_det[None, :] + maha)


def _log_weighted_densities(data: np.ndarray, params: GmmParams) -> np.ndarray:
    """log(pi_k * F(x, theta_k)) for every row and component, shape (N, g)."""
    if data.shape[1] != params.d:
        raise ValueError(f"dimension mismatch: data has {data.shape[1]} columns, model expects {params.d}")
    with np.errstate(divide="ignore"):
        log_w = np.log(params.weights)
    out = log_w[None, :] + _component_log_pdfs(data, params.means, params.covariances)
    out[:, params.weights == 0.0] = -np.inf
    return out


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    return (m + np.log(np.exp(a - m).sum(axis=axis, keepdims=True))).squeeze(axis)


def gmm_density(x: np.ndarray, params: GmmParams) -> float:
    """Mixture probability density at a single point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    log_wd = _log_weighted_densities(x[None, :], params)
    return float(np.exp(_logsumexp(log_wd, axis=1)[0]))


def responsibilities(x: np.ndarray, params: GmmParams) -> np.ndarray:
    """Posterior component probabilities at a point, computed in log-space."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    log_wd = _log_weighted_densities(x[None, :], params)[0]
    log_norm = _logsumexp(log_wd[None, :], axis=1)[0]
    return np.exp(log_wd - log_norm)


def _init_from_kmeans(data: np.ndarray, g: int, seed: int) -> GmmParams:
    km = kmeans_fit(data, k=g, seed=seed)
    n, d = data.shape
    weights = np.bincount(km.labels, minlength=g).astype(float) / n
    means = km.centroids.copy()
    covariances = np.empty((g, d, d))
    global_diff = data - data.mean(axis=0)
    global_cov = global_diff.T @ global_diff / n
    for k in range(g):
        members = data[km.labels == k]
        if len(members) >= 2:
            diff = members - members.mean(axis=0)
            cov = diff.T @ diff / len(members)
        else:
            cov = global_cov.copy()
        covariances[k] = cov + VARIANCE_FLOOR * np.eye(d)
    return GmmParams(weights=weights, means=means, covariances=covariances)


def gmm_fit(
    m: FeatureMatrix | np.ndarray,
    g: int,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> GmmModel:
    """Fit a g-component mixture by EM.

    Stops when the relative log-likelihood improvement drops below `tol`
    or after `max_iter` iterations. Hard labels are the per-point argmax
    responsibility (ties resolve to the lowest component index).
    """
    data = _as_array(m)
    n, d = data.shape
    if not 1 <= g <= n:
        raise ValueError(f"g must be in [1, {n}], got {g}")
    if n < 2:
        raise ValueError("gmm_fit requires at least 2 points")

    params = _init_from_kmeans(data, g, seed)
    eye = np.eye(d)

    ll_trace: list[float] = []
    weights_trace: list[np.ndarray] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        # E-step
        log_wd = _log_weighted_densities(data, params)
        log_norm = _logsumexp(log_wd, axis=1)
        if not np.isfinite(log_norm).all():
            raise FitError(f"numerical collapse at iteration {iterations}")
        log_resp = log_wd - log_norm[:, None]
        ll = float(log_norm.sum())
        ll_trace.append(ll)

        # M-step
        resp = np.exp(log_resp)
        nk = resp.sum(axis=0)
        weights = nk / n
        alive = nk > 1e-12
        nk_safe = np.where(alive, nk, 1.0)
        means = (resp.T @ data) / nk_safe[:, None]
        covariances = np.empty((g, d, d))
        for k in range(g):
            diff = data - means[k]
            covariances[k] = (resp[:, k, None] * diff).T @ diff / nk_safe[k]
        covariances += VARIANCE_FLOOR * eye[None, :, :]
        # dead components keep their previous parameters at weight ~0
        means[~alive] = params.means[~alive]
        covariances[~alive] = params.covariances[~alive]
        params = GmmParams(weights=weights, means=means, covariances=covariances)
        weights_trace.append(weights.copy())

        if len(ll_trace) >= 2:
            prev = ll_trace[-2]
            if (ll - prev) < tol * abs(prev):
                break

    # final E-step so labels and likelihood reflect the converged parameters
    log_wd = _log_weighted_densities(data, params)
    log_norm = _logsumexp(log_wd, axis=1)
    if not np.isfinite(log_norm).all():
        raise FitError(f"numerical collapse at iteration {iterations}")
    ll_trace.append(float(log_norm.sum()))
    labels = np.argmax(log_wd - log_norm[:, None], axis=1)
    return GmmModel(
        params=params,
        labels=labels,
        log_likelihood=ll_trace[-1],
        log_likelihood_trace=ll_trace,
        weights_trace=weights_trace,
        iterations_run=iterations,
        seed=seed,
    )


@dataclass(frozen=True)
class CategoryRow:
    category: int
    mean_duration_min: float
    weight: float
    count: int


def category_summary(model: GmmModel, m: FeatureMatrix) -> list[CategoryRow]:
    """Per-component mean durations in raw units, sorted ascending.

    Duration must be feature column 0; zscored matrices are inverse-mapped
    through their stored scaling metadata.
    """
    data = _as_array(m)
    if data.shape[0] != len(model.labels) or data.shape[1] != model.params.d:
        raise ValueError("feature matrix does not match the fitted model")
    mean_durations = model.params.means[:, 0].copy()
    if isinstance(m, FeatureMatrix) and m.scaling == "zscore":
        mean_durations = mean_durations * m.stds[0] + m.means[0]
    counts = np.bincount(model.labels, minlength=model.params.g)
    rows = [
        CategoryRow(
            category=k,
            mean_duration_min=float(mean_durations[k]),
            weight=float(model.params.weights[k]),
            count=int(counts[k]),
        )
        for k in range(model.params.g)
    ]
    rows.sort(key=lambda r: r.mean_duration_min)
    return rows
