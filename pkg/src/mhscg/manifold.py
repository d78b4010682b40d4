"""Grassmann geometry and a Riemannian trust-region solver for trace objectives.

Points are ``n x k`` matrices with orthonormal columns standing for their
column span. Tangent vectors at ``X`` are ``n x k`` matrices ``xi`` with
``X.T @ xi == 0``; the metric is the Frobenius inner product.

The only objectives handled are ``f(X) = tr(X^T M X)`` with ``M`` symmetric,
for which gradient and Hessian are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

NEGATIVE_CURVATURE = "negative-curvature"
BOUNDARY = "boundary"
TOLERANCE = "tolerance"
MAX_INNER = "max-inner"


@dataclass(frozen=True)
class QuadraticTraceObjective:
    M: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise ValueError("M must be square")
        if not np.allclose(M, M.T, rtol=0, atol=1e-10 * max(1.0, np.abs(M).max())):
            raise ValueError("M must be symmetric")
        object.__setattr__(self, "M", M)

    def value(self, X: np.ndarray) -> float:
        return float(np.sum(X * (self.M @ X)))


@dataclass
class TrustRegionConfig:
    """Solver settings. ``None`` entries are filled from ``(n, k)`` by :meth:`resolve`."""

    delta_bar: Optional[float] = None
    delta0: Optional[float] = None
    rho_prime: float = 0.1
    max_outer: int = 200
    grad_tol: float = 1e-9
    max_inner: Optional[int] = None
    kappa: float = 0.1
    theta: float = 1.0

    def resolve(self, n: int, k: int) -> "TrustRegionConfig":
        delta_bar = self.delta_bar if self.delta_bar is not None else math.sqrt(k)
        delta0 = self.delta0 if self.delta0 is not None else delta_bar / 8
        max_inner = self.max_inner if self.max_inner is not None else max(1, k * (n - k))
        cfg = TrustRegionConfig(
            delta_bar=delta_bar,
            delta0=delta0,
            rho_prime=self.rho_prime,
            max_outer=self.max_outer,
            grad_tol=self.grad_tol,
            max_inner=max_inner,
            kappa=self.kappa,
            theta=self.theta,
        )
        if not 0 < cfg.delta0 <= cfg.delta_bar:
            raise ValueError("need 0 < delta0 <= delta_bar")
        if not 0 < cfg.rho_prime < 0.25:
            raise ValueError("need 0 < rho_prime < 0.25")
        if cfg.grad_tol <= 0 or cfg.kappa <= 0 or cfg.theta <= 0:
            raise ValueError("tolerances must be positive")
        return cfg


@dataclass
class RTRResult:
    point: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool
    values: list = field(default_factory=list)   # objective after each accepted step
    stop_reasons: list = field(default_factory=list)


def _check_shapes(X, Z):
    if X.shape != Z.shape:
        raise ValueError(f"shape mismatch: {X.shape} vs {Z.shape}")


def project_tangent(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """``(I - X X^T) Z``."""
    _check_shapes(X, Z)
    return Z - X @ (X.T @ Z)


def retract(X: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Q factor of ``X + xi`` with a positive diagonal in R."""
    _check_shapes(X, xi)
    if not np.any(xi):
        return X.copy()
    Q, R = np.linalg.qr(X + xi)
    d = np.diag(R)
    if np.any(np.abs(d) <= 1e-14 * max(1.0, np.abs(d).max())):
        raise np.linalg.LinAlgError("X + xi is rank deficient")
    return Q * np.sign(d)[None, :]


def riemannian_grad(X: np.ndarray, obj: QuadraticTraceObjective) -> np.ndarray:
    """``2 (I - X X^T) M X``, the ascent direction of ``tr(X^T M X)``."""
    MX = obj.M @ X
    return 2.0 * (MX - X @ (X.T @ MX))


def riemannian_hess_apply(X: np.ndarray, xi: np.ndarray, obj: QuadraticTraceObjective) -> np.ndarray:
    XtMX = X.T @ (obj.M @ X)
    return 2.0 * project_tangent(X, obj.M @ xi - xi @ XtMX)


def _inner(a, b) -> float:
    return float(np.vdot(a, b))


def truncated_cg(X, grad, obj, radius, cfg: TrustRegionConfig):
    """Steihaug-Toint CG on the model of the negated objective.

    Approximately minimizes ``m(eta) = <grad, eta> + 1/2 <eta, H eta>``
    over ``||eta|| <= radius`` where ``grad`` is the gradient of ``-f`` and
    ``H`` the Hessian of ``-f`` at ``X``.

    Returns ``(eta, reason, inner_iterations)``.
    """
    cfg = cfg.resolve(*X.shape)

    def hess(v):
        return -riemannian_hess_apply(X, v, obj)

    eta = np.zeros_like(X)
    r = project_tangent(X, grad)
    r_r = _inner(r, r)
    norm_r0 = math.sqrt(r_r)
    if norm_r0 == 0.0 or not np.isfinite(norm_r0):
        return eta, TOLERANCE, 0

    delta = -r
    e_Pe = 0.0
    e_Pd = 0.0
    d_Pd = r_r
    target = norm_r0 * min(norm_r0 ** cfg.theta, cfg.kappa)

    for j in range(1, cfg.max_inner + 1):
        Hdelta = hess(delta)
        d_Hd = _inner(delta, Hdelta)
        alpha = r_r / d_Hd if d_Hd != 0 else np.inf
        e_Pe_new = e_Pe + 2.0 * alpha * e_Pd + alpha * alpha * d_Pd

        if d_Hd <= 0 or e_Pe_new >= radius * radius:
            tau = (-e_Pd + math.sqrt(e_Pd * e_Pd + d_Pd * (radius * radius - e_Pe))) / d_Pd
            eta = eta + tau * delta
            return eta, (NEGATIVE_CURVATURE if d_Hd <= 0 else BOUNDARY), j

        eta = eta + alpha * delta
        e_Pe = e_Pe_new
        r = project_tangent(X, r + alpha * Hdelta)
        r_r_new = _inner(r, r)
        if math.sqrt(r_r_new) <= target:
            return eta, TOLERANCE, j

        beta = r_r_new / r_r
        r_r = r_r_new
        delta = project_tangent(X, -r + beta * delta)
        e_Pd = beta * (e_Pd + alpha * d_Pd)
        d_Pd = r_r + beta * beta * d_Pd

    return eta, MAX_INNER, cfg.max_inner


def _retraction_increment(X, MX, eta, M) -> float:
    """``f(retract(X, eta)) - f(X)`` evaluated in terms of ``eta`` alone.

    With ``X^T eta = 0`` the QR retraction has ``R^T R = I + N``, ``N = eta^T eta``,
    so the new value is ``tr(A (I + N)^-1)`` with ``A = (X+eta)^T M (X+eta)``.
    Subtracting two full traces would lose the digits the ratio test needs
    near convergence; this form keeps accuracy relative to ``||eta||``.
    """
    Meta = M @ eta
    N = eta.T @ eta
    k = N.shape[0]
    A = X.T @ MX + X.T @ Meta + eta.T @ MX + eta.T @ Meta
    NS = np.linalg.solve(np.eye(k) + N, N)  # N (I+N)^-1, symmetric
    return 2.0 * _inner(eta, MX) + _inner(eta, Meta) - float(np.sum(A * NS.T))


def rtr_maximize(obj, X0: np.ndarray, cfg: Optional[TrustRegionConfig] = None) -> RTRResult:
    """Maximize ``tr(X^T M X)`` over the Grassmannian starting from ``X0``.

    Internally this minimizes the negated objective. Steps with
    ``rho <= rho_prime`` are rejected, so accepted values never decrease.
    Non-convergence within ``max_outer`` iterations is reported through
    ``RTRResult.converged``; no exception is raised.
    """
    if not isinstance(obj, QuadraticTraceObjective):
        obj = QuadraticTraceObjective(obj)
    X = np.array(X0, dtype=float)
    n, k = X.shape
    cfg = (cfg or TrustRegionConfig()).resolve(n, k)

    fx = obj.value(X)
    MX = obj.M @ X
    grad = riemannian_grad(X, obj)
    gnorm = math.sqrt(_inner(grad, grad))
    radius = cfg.delta0
    values = [fx]
    reasons = []
    it = 0

    while gnorm > cfg.grad_tol and it < cfg.max_outer:
        it += 1
        # minimize g = -f: its gradient is -grad
        eta, reason, _ = truncated_cg(X, -grad, obj, radius, cfg)
        reasons.append(reason)
        Heta = -riemannian_hess_apply(X, eta, obj)
        model_dec = -(_inner(-grad, eta) + 0.5 * _inner(eta, Heta))

        X_new = retract(X, eta)
        actual_dec = _retraction_increment(X, MX, eta, obj.M)
        f_new = fx + actual_dec

        if model_dec < 1e-13 * max(abs(fx), 1e-300):
            rho = 1.0 if actual_dec >= 0 else -np.inf
        else:
            rho = actual_dec / model_dec

        if rho < 0.25:
            radius /= 4.0
        elif rho > 0.75 and reason in (NEGATIVE_CURVATURE, BOUNDARY):
            radius = min(2.0 * radius, cfg.delta_bar)

        if rho > cfg.rho_prime:
            X, fx = X_new, f_new
            MX = obj.M @ X
            grad = riemannian_grad(X, obj)
            gnorm = math.sqrt(_inner(grad, grad))
            values.append(fx)
        elif radius < 1e-15 * cfg.delta_bar:
            # cannot make progress at machine precision
            break

    return RTRResult(
        point=X,
        value=fx,
        grad_norm=gnorm,
        iterations=it,
        converged=gnorm <= cfg.grad_tol,
        values=values,
        stop_reasons=reasons,
    )


def dominant_subspace(M: np.ndarray, k: int, return_eigenvalues: bool = False):
    """Orthonormal eigenvectors of the ``k`` largest eigenvalues, in descending order."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside [1, {n}]")
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    idx = np.arange(n - 1, n - 1 - k, -1)
    X = V[:, idx]
    if return_eigenvalues:
        return X, w[idx]
    return X


def principal_angles(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Principal angles between ``span(X)`` and ``span(Y)``, ascending.

    Cosines come from the singular values of ``X^T Y``; angles below
    ``pi/4`` are taken from the sines instead, which keeps small angles
    accurate where ``arccos`` loses half the digits.
    """
    _check_shapes(X, Y)
    cos = np.linalg.svd(X.T @ Y, compute_uv=False)
    cos = np.clip(cos, -1.0, 1.0)
    angles = np.arccos(cos)
    sin = np.linalg.svd(Y - X @ (X.T @ Y), compute_uv=False)
    sin = np.clip(np.sort(sin), 0.0, 1.0)
    small = angles < np.pi / 4
    angles[small] = np.arcsin(sin[small])
    return np.sort(angles)


def random_point(n: int, k: int, rng=None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    Q, R = np.linalg.qr(rng.standard_normal((n, k)))
    return Q * np.sign(np.diag(R))[None, :]
