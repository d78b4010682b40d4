"""Row normalization and k-means with k-means++ seeding."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    restarts: int = 30
    max_iters: int = 100
    tol: float = 1e-8
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


def row_normalize(F: np.ndarray) -> np.ndarray:
    """Scale rows to unit length; rows with norm below 1e-12 become exact zeros."""
    F = np.asarray(F, dtype=float)
    norms = np.linalg.norm(F, axis=1)
    out = np.zeros_like(F)
    ok = norms >= 1e-12
    out[ok] = F[ok] / norms[ok, None]
    return out


def _sq_dists(X, centers):
    d = (
        np.einsum("ij,ij->i", X, X)[:, None]
        - 2.0 * X @ centers.T
        + np.einsum("ij,ij->i", centers, centers)[None, :]
    )
    return np.maximum(d, 0.0)


def kmeans_plus_plus(X: np.ndarray, k: int, rng) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(X, X[chosen]).ravel()
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a seed already; pick an unused index
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        closest = np.minimum(closest, _sq_dists(X, X[[idx]]).ravel())
    return X[chosen].copy()


def inertia(X: np.ndarray, labels: np.ndarray) -> float:
    """Sum of squared distances to the cluster means implied by ``labels``."""
    X = np.asarray(X, dtype=float)
    total = 0.0
    for c in np.unique(labels):
        P = X[labels == c]
        total += float(np.sum((P - P.mean(axis=0)) ** 2))
    return total


def _lloyd(X, centers, max_iters, tol):
    """Lloyd iterations from the given centers.

    Returns ``(labels, centers, history)`` where ``history`` holds the
    inertia after each assignment step.
    """
    k = centers.shape[0]
    history = []
    for _ in range(max_iters):
        d = _sq_dists(X, centers)
        labels = d.argmin(axis=1)
        own = d[np.arange(X.shape[0]), labels]
        history.append(float(own.sum()))

        new = centers.copy()
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(centers)
        np.add.at(sums, labels, X)
        filled = counts > 0
        new[filled] = sums[filled] / counts[filled, None]
        for c in np.flatnonzero(~filled):
            far = int(own.argmax())
            new[c] = X[far]
            own[far] = 0.0
        shift = float(np.sqrt(np.max(np.sum((new - centers) ** 2, axis=1))))
        centers = new
        if shift <= tol:
            break

    d = _sq_dists(X, centers)
    labels = d.argmin(axis=1)
    history.append(float(d[np.arange(X.shape[0]), labels].sum()))
    return labels, centers, history


def kmeans(E: np.ndarray, cfg: KMeansConfig, seed: Optional[int] = None):
    """One k-means run. Returns ``(labels, inertia)``."""
    X = np.asarray(E, dtype=float)
    n = X.shape[0]
    if n < cfg.k:
        raise ValueError(f"n={n} < k={cfg.k}")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    centers = kmeans_plus_plus(X, cfg.k, rng)
    labels, _, history = _lloyd(X, centers, cfg.max_iters, cfg.tol)
    return labels.astype(np.int64), history[-1]


def best_of_restarts(E: np.ndarray, cfg: KMeansConfig) -> np.ndarray:
    """Labels of the lowest-inertia run among seeds ``seed, seed+1, ...``.

    Ties go to the earliest seed, so the result does not depend on ``threads``.
    """
    seeds = [cfg.seed + i for i in range(cfg.restarts)]
    if cfg.threads > 1 and cfg.restarts > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            runs = list(pool.map(lambda s: kmeans(E, cfg, seed=s), seeds))
    else:
        runs = [kmeans(E, cfg, seed=s) for s in seeds]
    best = min(range(len(runs)), key=lambda i: (runs[i][1], i))
    return runs[best][0]
