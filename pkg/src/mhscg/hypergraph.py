"""Hypergraph generation from sparse neighbour reconstructions.

Each sample is the centroid of one hyperedge. The hyperedge also holds the
sample's ``sigma`` nearest neighbours, with membership probabilities taken
from the closed-form simplex-constrained reconstruction weights.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_SIGMA = 10


@dataclass(frozen=True)
class SimilarityMatrix:
    """Row-stochastic sparse weights.

    ``neighbors[i]`` lists the ``sigma`` nearest samples of ``i`` (closest
    first). It is kept explicitly because a distance tie at the cut-off can
    give a listed neighbour an exact-zero weight.
    """

    A: np.ndarray
    neighbors: np.ndarray
    sigma: int


@dataclass(frozen=True)
class Hypergraph:
    incidence: np.ndarray        # H, n x m with m = n
    weights: np.ndarray          # diag of W
    vertex_degrees: np.ndarray   # diag of Dv
    edge_degrees: np.ndarray     # diag of De


@dataclass(frozen=True)
class LaplacianPair:
    theta: np.ndarray
    delta: np.ndarray

    @property
    def n(self) -> int:
        return self.theta.shape[0]


def pairwise_sq_dists(X: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between rows of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite entries")
    sq = np.einsum("ij,ij->i", X, X)
    C = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    C = 0.5 * (C + C.T)
    np.maximum(C, 0.0, out=C)
    np.fill_diagonal(C, 0.0)
    return C


def clamp_sigma(sigma: int, n: int) -> int:
    return max(1, min(int(sigma), n - 2))


def sparse_similarity(C: np.ndarray, sigma: int = DEFAULT_SIGMA) -> SimilarityMatrix:
    """Closed-form sparse weights from a squared-distance matrix.

    For row ``i`` with off-diagonal distances sorted ascending as
    ``c_1 <= ... <= c_{n-1}``, the ``sigma`` nearest neighbours get

        a_ij = (c_{sigma+1} - c_ij) / (sigma * c_{sigma+1} - sum_{h<=sigma} c_h)

    and every other entry is zero. Ties are broken by ascending index.
    When the first ``sigma + 1`` distances coincide the denominator vanishes
    and the row falls back to uniform ``1/sigma`` weights.
    """
    C = np.asarray(C, dtype=float)
    n = C.shape[0]
    if C.shape != (n, n):
        raise ValueError("C must be square")
    if np.isnan(C).any():
        raise ValueError("distance matrix contains NaN")
    sigma = int(sigma)
    if not 1 <= sigma <= n - 2:
        raise ValueError(f"sigma={sigma} outside [1, n-2] for n={n}")

    # self gets +inf so it sorts last; stable sort keeps index order on ties
    D = C.copy()
    np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")[:, : sigma + 1]
    near = np.take_along_axis(D, order, axis=1)
    c_cut = near[:, sigma]
    c_in = near[:, :sigma]
    denom = sigma * c_cut - c_in.sum(axis=1)

    scale = np.maximum(sigma * np.abs(c_cut), np.finfo(float).tiny)
    degenerate = denom <= 1e-12 * scale
    safe = np.where(degenerate, 1.0, denom)
    W = (c_cut[:, None] - c_in) / safe[:, None]
    W[degenerate] = 1.0 / sigma
    np.maximum(W, 0.0, out=W)
    W /= W.sum(axis=1, keepdims=True)

    A = np.zeros((n, n))
    rows = np.arange(n)[:, None]
    A[rows, order[:, :sigma]] = W
    return SimilarityMatrix(A=A, neighbors=order[:, :sigma].copy(), sigma=sigma)


def build_incidence(S: SimilarityMatrix) -> Hypergraph:
    """Probabilistic incidence matrix with one hyperedge per centroid.

    ``H[j, j] = 1`` and ``H[i, j] = A[j, i]`` for the neighbours ``i`` of
    ``j``; all hyperedges carry unit weight.
    """
    A = S.A
    n = A.shape[0]
    H = np.zeros((n, n))
    cols = np.repeat(np.arange(n), S.sigma)
    nbrs = S.neighbors.ravel()
    H[nbrs, cols] = A[cols, nbrs]
    H[np.arange(n), np.arange(n)] = 1.0
    w = np.ones(n)
    dv, de = degrees(H, w)
    return Hypergraph(incidence=H, weights=w, vertex_degrees=dv, edge_degrees=de)


def degrees(H: np.ndarray, W: np.ndarray):
    """Vertex and hyperedge degrees ``(d(v), delta(e))`` as 1-D arrays.

    ``W`` may be the diagonal weight matrix or its diagonal.
    """
    H = np.asarray(H, dtype=float)
    w = np.asarray(W, dtype=float)
    if w.ndim == 2:
        w = np.diag(w)
    if np.any(w <= 0):
        raise ValueError("hyperedge weights must be positive")
    if H.min(initial=0.0) < 0 or H.max(initial=0.0) > 1:
        raise ValueError("incidence entries must lie in [0, 1]")
    dv = H @ w
    de = H.sum(axis=0)
    if np.any(dv <= 0):
        raise ValueError("zero vertex degree; hypergraph cannot be normalized")
    return dv, de


def laplacian(H: np.ndarray, W: np.ndarray, dv: np.ndarray, de: np.ndarray) -> LaplacianPair:
    """Normalized pair ``Theta = Dv^-1/2 H W De^-1 H^T Dv^-1/2``, ``Delta = I - Theta``."""
    w = np.asarray(W, dtype=float)
    if w.ndim == 2:
        w = np.diag(w)
    dv = np.asarray(dv, dtype=float)
    de = np.asarray(de, dtype=float)
    if dv.ndim == 2:
        dv = np.diag(dv)
    if de.ndim == 2:
        de = np.diag(de)
    if np.any(dv <= 0) or np.any(de <= 0):
        raise ValueError("singular degree matrix")
    B = (H / np.sqrt(dv)[:, None]) * np.sqrt(w / de)[None, :]
    theta = B @ B.T
    theta = 0.5 * (theta + theta.T)
    delta = np.eye(theta.shape[0]) - theta
    return LaplacianPair(theta=theta, delta=delta)


def view_laplacian(X: np.ndarray, sigma: int = DEFAULT_SIGMA) -> LaplacianPair:
    """Features to Laplacian pair in one call; ``sigma`` is clamped to ``n - 2``."""
    C = pairwise_sq_dists(X)
    S = sparse_similarity(C, clamp_sigma(sigma, C.shape[0]))
    hg = build_incidence(S)
    return laplacian(hg.incidence, hg.weights, hg.vertex_degrees, hg.edge_degrees)
