import math

import numpy as np
import pytest

from mhscg.manifold import (
    BOUNDARY,
    NEGATIVE_CURVATURE,
    TOLERANCE,
    QuadraticTraceObjective,
    TrustRegionConfig,
    dominant_subspace,
    principal_angles,
    project_tangent,
    retract,
    riemannian_grad,
    riemannian_hess_apply,
    rtr_maximize,
    truncated_cg,
)
from oracles import cauchy_decrease, random_orthogonal, spd_with_gap

E1 = np.array([[1.0], [0.0]])


def _sym(rng, n):
    A = rng.standard_normal((n, n))
    return QuadraticTraceObjective(A + A.T)


def _inner(a, b):
    return float(np.sum(a * b))


def test_project_removes_component():
    assert project_tangent(E1, np.array([[1.0], [1.0]])).ravel().tolist() == [0.0, 1.0]


def test_project_idempotent_and_tangent(rng, point):
    X = point(15, 3)
    Z = rng.standard_normal((15, 3))
    P = project_tangent(X, Z)
    assert np.linalg.norm(X.T @ P) <= 1e-12
    assert np.allclose(project_tangent(X, P), P, atol=1e-14)


def test_project_shape_mismatch(point):
    with pytest.raises(ValueError):
        project_tangent(point(5, 2), np.zeros((5, 3)))


def test_retract_single_column():
    t = 0.7
    Y = retract(E1, np.array([[0.0], [t]]))
    assert np.allclose(Y.ravel(), np.array([1.0, t]) / math.sqrt(1 + t * t), atol=1e-15)


def test_retract_zero_step_is_identity(point):
    X = point(6, 2)
    assert np.array_equal(retract(X, np.zeros_like(X)), X)


def test_retract_orthonormal(rng, point):
    for _ in range(20):
        X = point(12, 3)
        xi = 0.1 * project_tangent(X, rng.standard_normal((12, 3)))
        Y = retract(X, xi)
        assert np.max(np.abs(Y.T @ Y - np.eye(3))) <= 1e-12


def test_grad_vanishes_at_eigenvector():
    obj = QuadraticTraceObjective(np.diag([3.0, 2.0, 1.0]))
    assert np.all(riemannian_grad(np.eye(3)[:, :1], obj) == 0)


def test_grad_vanishes_for_identity(point):
    obj = QuadraticTraceObjective(np.eye(7))
    assert np.linalg.norm(riemannian_grad(point(7, 3), obj)) <= 1e-14


def test_grad_matches_finite_differences(rng, point):
    for _ in range(20):
        n, k = 10, 3
        obj = _sym(rng, n)
        X = point(n, k)
        xi = project_tangent(X, rng.standard_normal((n, k)))
        t = 1e-5
        fd = (obj.value(retract(X, t * xi)) - obj.value(retract(X, -t * xi))) / (2 * t)
        exact = _inner(riemannian_grad(X, obj), xi)
        assert abs(fd - exact) <= 1e-5 * abs(exact)


def test_hessian_zero_for_identity(rng, point):
    X = point(6, 2)
    xi = project_tangent(X, rng.standard_normal((6, 2)))
    assert np.linalg.norm(riemannian_hess_apply(X, xi, QuadraticTraceObjective(np.eye(6)))) <= 1e-14


def test_hessian_self_adjoint_and_tangent(rng, point):
    for _ in range(20):
        obj = _sym(rng, 9)
        X = point(9, 3)
        u = project_tangent(X, rng.standard_normal((9, 3)))
        v = project_tangent(X, rng.standard_normal((9, 3)))
        Hu = riemannian_hess_apply(X, u, obj)
        assert abs(_inner(Hu, v) - _inner(u, riemannian_hess_apply(X, v, obj))) <= 1e-8
        assert np.linalg.norm(X.T @ Hu) <= 1e-12


def test_hessian_matches_gradient_differences(rng, point):
    # d/dt P_X(grad(R_X(t xi))) at t = 0 equals Hess[xi] on the Grassmannian
    for _ in range(10):
        n, k = 8, 2
        obj = _sym(rng, n)
        X = point(n, k)
        xi = project_tangent(X, rng.standard_normal((n, k)))
        t = 1e-6
        gp = riemannian_grad(retract(X, t * xi), obj)
        gm = riemannian_grad(retract(X, -t * xi), obj)
        fd = project_tangent(X, (gp - gm) / (2 * t))
        H = riemannian_hess_apply(X, xi, obj)
        assert np.linalg.norm(fd - H) <= 1e-4 * np.linalg.norm(H)


def test_tcg_zero_gradient():
    X = np.eye(3)[:, :1]
    obj = QuadraticTraceObjective(np.diag([3.0, 2.0, 1.0]))
    step, reason, _ = truncated_cg(X, np.zeros((3, 1)), obj, 0.5, TrustRegionConfig())
    assert reason == TOLERANCE and not step.any()


@pytest.mark.parametrize("radius", [1e-3, 0.05, 0.3, 2.0])
def test_tcg_within_radius_and_beats_cauchy(rng, point, radius):
    obj = QuadraticTraceObjective(np.diag([3.0, 2.0, 1.0]))
    for _ in range(25):
        X = point(3, 1)
        g = -riemannian_grad(X, obj)  # gradient of the minimized -f
        step, reason, _ = truncated_cg(X, g, obj, radius, TrustRegionConfig())
        assert np.linalg.norm(step) <= radius * (1 + 1e-12)
        assert np.linalg.norm(X.T @ step) <= 1e-12

        def model(eta):
            return _inner(g, eta) + 0.5 * _inner(eta, -riemannian_hess_apply(X, eta, obj))

        gHg = _inner(g, -riemannian_hess_apply(X, g, obj))
        assert -model(step) >= cauchy_decrease(g, gHg, radius) - 1e-12


def test_tcg_reports_negative_curvature():
    # at the minimizer of f, -f has negative curvature in every direction
    obj = QuadraticTraceObjective(np.diag([3.0, 2.0, 1.0]))
    X = np.array([[0.0], [1e-3], [1.0]])
    X /= np.linalg.norm(X)
    g = -riemannian_grad(X, obj)
    _, reason, _ = truncated_cg(X, g, obj, 10.0, TrustRegionConfig())
    assert reason in (NEGATIVE_CURVATURE, BOUNDARY)


def test_rtr_small_diagonal():
    obj = QuadraticTraceObjective(np.diag([3.0, 2.0, 1.0]))
    res = rtr_maximize(obj, np.ones((3, 1)) / math.sqrt(3))
    assert res.converged
    assert res.value == pytest.approx(3.0, abs=1e-12)
    assert principal_angles(res.point, np.eye(3)[:, :1]).max() <= 1e-8
    assert np.all(np.diff(res.values) >= 0)


def test_rtr_returns_immediately_at_optimum(rng):
    M = spd_with_gap(12, 3, rng)
    X0 = dominant_subspace(M, 3)
    res = rtr_maximize(M, X0)
    assert res.iterations == 0 and res.converged
    assert np.array_equal(res.point, X0)


def test_rtr_matches_eigen_oracle(rng, point):
    for _ in range(50):
        n = int(rng.integers(6, 41))
        k = int(rng.integers(1, 6))
        M = spd_with_gap(n, k, rng)
        res = rtr_maximize(M, point(n, k))
        assert res.converged
        assert principal_angles(res.point, dominant_subspace(M, k)).max() <= 1e-6
        assert np.all(np.diff(res.values) >= -1e-12)


def test_rtr_respects_max_outer(rng, point):
    M = spd_with_gap(30, 4, rng)
    res = rtr_maximize(M, point(30, 4), TrustRegionConfig(max_outer=1))
    assert res.iterations == 1 and not res.converged


def test_trust_region_config_validation():
    with pytest.raises(ValueError):
        TrustRegionConfig(rho_prime=0.3).resolve(5, 2)
    with pytest.raises(ValueError):
        TrustRegionConfig(delta0=2.0, delta_bar=1.0).resolve(5, 2)
    cfg = TrustRegionConfig().resolve(10, 4)
    assert cfg.delta_bar == 2.0 and cfg.delta0 == 0.25 and cfg.max_inner == 24


def test_objective_rejects_asymmetric():
    with pytest.raises(ValueError):
        QuadraticTraceObjective(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_dominant_subspace_diag():
    X = dominant_subspace(np.diag([3.0, 2.0, 1.0]), 2)
    assert principal_angles(X, np.eye(3)[:, :2]).max() <= 1e-12


def test_dominant_subspace_degenerate_identity():
    X, w = dominant_subspace(np.eye(5), 2, return_eigenvalues=True)
    assert np.allclose(X.T @ X, np.eye(2)) and np.allclose(w, 1.0)
    assert np.linalg.norm(np.eye(5) @ X - X * w) <= 1e-12


def test_dominant_subspace_residuals_and_reconstruction(rng):
    A = rng.standard_normal((15, 15))
    M = A + A.T
    V, w = dominant_subspace(M, 15, return_eigenvalues=True)
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs((V * w) @ V.T - M)) <= 1e-8
    norm = np.linalg.norm(M, 2)
    for i in range(15):
        assert np.linalg.norm(M @ V[:, i] - w[i] * V[:, i]) <= 1e-8 * norm


def test_dominant_subspace_bad_k():
    with pytest.raises(ValueError):
        dominant_subspace(np.eye(3), 4)


def test_principal_angles_basic(point):
    X = point(8, 3)
    assert principal_angles(X, X).max() <= 1e-14
    e1, e2 = np.eye(3)[:, :1], np.eye(3)[:, 1:2]
    assert principal_angles(e1, e2)[0] == pytest.approx(math.pi / 2)


def test_principal_angles_rotation_invariant(rng, point):
    X = point(10, 4)
    Y = point(10, 4)
    Q1, Q2 = random_orthogonal(4, rng), random_orthogonal(4, rng)
    assert principal_angles(X, X @ Q1).max() <= 1e-8
    assert np.allclose(principal_angles(X, Y), principal_angles(X @ Q1, Y @ Q2), atol=1e-12)


def test_principal_angles_small_angle_accuracy():
    a = 1e-9
    X = np.array([[1.0], [0.0]])
    Y = np.array([[math.cos(a)], [math.sin(a)]])
    assert principal_angles(X, Y)[0] == pytest.approx(a, rel=1e-6)


def test_trace_objective_rotation_invariant(rng, point):
    obj = _sym(rng, 12)
    X = point(12, 4)
    Q = random_orthogonal(4, rng)
    assert abs(obj.value(X @ Q) - obj.value(X)) <= 1e-10
