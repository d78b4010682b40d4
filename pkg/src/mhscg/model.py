"""Multi-view hypergraph spectral clustering on the Grassmannian.

The objective couples one subspace per view with a consensus subspace::

    f = sum_l tr(F_l^T Theta_l F_l) + sum_l lambda_l tr(F_l F_l^T F* F*^T)

and is maximized by alternating trust-region solves: each view against
the current consensus, then the consensus against all views. After every
sweep the consensus residual ``val = k - tr(F*^T Theta* F*)`` is checked;
when ``|val| > epsilon`` every weight is halved and the consensus update
of that sweep is discarded.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .cluster import KMeansConfig, best_of_restarts, row_normalize
from .manifold import (
    QuadraticTraceObjective,
    RTRResult,
    TrustRegionConfig,
    dominant_subspace,
    rtr_maximize,
)


@dataclass
class MhscgConfig:
    k: int
    lambda0: float = 1.0
    max_outer: int = 50
    epsilon: float = 1e-5
    obj_tol: float = 1e-6
    lambda_floor: float = 1e-8
    rtr: TrustRegionConfig = field(default_factory=TrustRegionConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.lambda0 <= 0 or self.epsilon <= 0 or self.lambda_floor <= 0:
            raise ValueError("lambda0, epsilon and lambda_floor must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")


@dataclass
class SolverState:
    views: list                 # F^(l), n x k each
    consensus: np.ndarray       # F*
    lambdas: np.ndarray
    thetas: list
    iteration: int = 0
    consensus_start: Optional[np.ndarray] = None  # F* at the start of the sweep

    @property
    def k(self) -> int:
        return self.consensus.shape[1]


@dataclass
class ConvergenceTrace:
    objective: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    rtr_iterations: list = field(default_factory=list)
    halved: list = field(default_factory=list)
    initial_objective: float = float("nan")
    converged: bool = False

    def __len__(self):
        return len(self.objective)

    def segments(self) -> list:
        """Split iteration indices into runs that share the same weights.

        The first segment also covers the initial state, reported as index -1.
        """
        segs, cur = [], [-1]
        for t, h in enumerate(self.halved):
            if h:
                segs.append(cur)
                cur = []
            cur.append(t)
        segs.append(cur)
        return segs

    def is_monotone(self, slack: float = 1e-9) -> bool:
        for seg in self.segments():
            vals = [self.initial_objective if t < 0 else self.objective[t] for t in seg]
            if any(b < a - slack for a, b in zip(vals, vals[1:])):
                return False
        return True


def _thetas(laplacians) -> list:
    out = [np.asarray(getattr(L, "theta", L), dtype=float) for L in laplacians]
    if not out:
        raise ValueError("need at least one view")
    n = out[0].shape[0]
    for T in out:
        if T.shape != (n, n):
            raise ValueError("inconsistent Laplacian sizes")
    return out


def discrepancy(F: np.ndarray, G: np.ndarray) -> float:
    """``-tr(F F^T G G^T) = -||F^T G||_F^2``."""
    if F.shape != G.shape:
        raise ValueError(f"shape mismatch: {F.shape} vs {G.shape}")
    FtG = F.T @ G
    return -float(np.sum(FtG * FtG))


def objective(state: SolverState) -> float:
    total = 0.0
    for F, T, lam in zip(state.views, state.thetas, state.lambdas):
        total += float(np.sum(F * (T @ F))) - lam * discrepancy(F, state.consensus)
    return total


def view_matrix(state: SolverState, l: int) -> np.ndarray:
    Fs = state.consensus
    return state.thetas[l] + state.lambdas[l] * (Fs @ Fs.T)


def consensus_matrix(state: SolverState) -> np.ndarray:
    n = state.consensus.shape[0]
    out = np.zeros((n, n))
    for F, lam in zip(state.views, state.lambdas):
        out += lam * (F @ F.T)
    return out


def update_view(state: SolverState, l: int, rtr: Optional[TrustRegionConfig] = None) -> RTRResult:
    """Maximize ``tr(F^T (Theta_l + lambda_l F* F*^T) F)`` warm-started at ``F^(l)``."""
    obj = QuadraticTraceObjective(view_matrix(state, l))
    return rtr_maximize(obj, state.views[l], rtr)


def update_consensus(state: SolverState, rtr: Optional[TrustRegionConfig] = None) -> RTRResult:
    """Maximize ``tr(F^T Theta* F)``, ``Theta* = sum_l lambda_l F_l F_l^T``, warm-started at ``F*``."""
    obj = QuadraticTraceObjective(consensus_matrix(state))
    return rtr_maximize(obj, state.consensus, rtr)


def consensus_residual(state: SolverState) -> float:
    # tr(F*^T (I - Theta*) F*) with F* orthonormal
    Fs = state.consensus
    fit = sum(lam * float(np.sum((F.T @ Fs) ** 2)) for F, lam in zip(state.views, state.lambdas))
    return state.k - fit


def adapt_lambda(state: SolverState, val: float, epsilon: float, lambda_floor: float = 1e-8) -> SolverState:
    """Halve every weight once and restore the sweep's starting ``F*`` when ``|val| > epsilon``."""
    if abs(val) <= epsilon:
        return state
    start = state.consensus if state.consensus_start is None else state.consensus_start
    return replace(
        state,
        lambdas=np.maximum(state.lambdas / 2.0, lambda_floor),
        consensus=start.copy(),
    )


def init_state(thetas, cfg: MhscgConfig) -> SolverState:
    thetas = _thetas(thetas)
    n = thetas[0].shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds n={n}")
    views = [dominant_subspace(T, cfg.k) for T in thetas]
    lambdas = np.full(len(thetas), float(cfg.lambda0))
    # equal weights make the weighted mean the plain mean
    mean = sum(lam * T for lam, T in zip(lambdas, thetas)) / lambdas.sum()
    Fs = dominant_subspace(mean, cfg.k)
    rng = np.random.default_rng(cfg.seed)
    Q, R = np.linalg.qr(Fs + 1e-8 * rng.standard_normal(Fs.shape))
    Fs = Q * np.sign(np.diag(R))[None, :]
    return SolverState(views=views, consensus=Fs, lambdas=lambdas, thetas=thetas)


def run(thetas: Sequence, cfg: MhscgConfig):
    """Alternating maximization. Returns ``(F*, ConvergenceTrace)``."""
    state = init_state(thetas, cfg)
    trace = ConvergenceTrace(initial_objective=objective(state))
    f_prev = trace.initial_objective

    for t in range(1, cfg.max_outer + 1):
        state.consensus_start = state.consensus.copy()
        counts = []
        for l in range(len(state.views)):
            res = update_view(state, l, cfg.rtr)
            state.views[l] = res.point
            counts.append(res.iterations)
        res = update_consensus(state, cfg.rtr)
        state.consensus = res.point
        counts.append(res.iterations)

        val = consensus_residual(state)
        new_state = adapt_lambda(state, val, cfg.epsilon, cfg.lambda_floor)
        halved = not np.array_equal(new_state.lambdas, state.lambdas)
        state = new_state
        state.iteration = t

        f = objective(state)
        trace.objective.append(f)
        trace.residual.append(val)
        trace.lambdas.append(state.lambdas.copy())
        trace.rtr_iterations.append(counts)
        trace.halved.append(halved)

        if abs(f - f_prev) <= cfg.obj_tol * max(1.0, abs(f_prev)):
            trace.converged = True
            break
        f_prev = f

    return state.consensus, trace


def hsc_single_view(theta, k: int, kmeans_cfg: Optional[KMeansConfig] = None) -> np.ndarray:
    """Single-view hypergraph spectral clustering: top-k eigenvectors, row-normalize, k-means."""
    T = np.asarray(getattr(theta, "theta", theta), dtype=float)
    if k == 1:
        return np.zeros(T.shape[0], dtype=np.int64)
    cfg = kmeans_cfg or KMeansConfig(k=k)
    if cfg.k != k:
        cfg = replace(cfg, k=k)
    E = row_normalize(dominant_subspace(T, k))
    return best_of_restarts(E, cfg)


def cluster_consensus(F_star: np.ndarray, kmeans_cfg: KMeansConfig) -> np.ndarray:
    return best_of_restarts(row_normalize(F_star), kmeans_cfg)
