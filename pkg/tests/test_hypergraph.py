import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mhscg.hypergraph import (
    build_incidence,
    degrees,
    laplacian,
    pairwise_sq_dists,
    sparse_similarity,
    view_laplacian,
)
from oracles import naive_sq_dists, simplex_qp_row


def _pipeline(X, sigma):
    S = sparse_similarity(pairwise_sq_dists(X), sigma)
    hg = build_incidence(S)
    return S, hg, laplacian(hg.incidence, hg.weights, hg.vertex_degrees, hg.edge_degrees)


def test_sq_dists_1d():
    C = pairwise_sq_dists(np.array([0.0, 1.0, 3.0]))
    assert C.tolist() == [[0, 1, 9], [1, 0, 4], [9, 4, 0]]


def test_sq_dists_matches_loops(rng):
    X = rng.standard_normal((20, 4))
    C = pairwise_sq_dists(X)
    assert np.max(np.abs(C - naive_sq_dists(X))) <= 1e-10
    assert np.all(np.diag(C) == 0) and np.array_equal(C, C.T) and C.min() >= 0


def test_closed_form_worked_row():
    S = sparse_similarity(pairwise_sq_dists(np.array([0.0, 1.0, 3.0, 7.0])), 2)
    assert S.A[0].tolist() == pytest.approx([0, 6 / 11, 5 / 11, 0], abs=1e-15)
    # the same row from the simplex QP at alpha = (2*49 - (1 + 9)) / 2
    a = simplex_qp_row(np.array([1.0, 9.0, 49.0]), 44.0)
    assert np.allclose(a, [6 / 11, 5 / 11, 0.0], atol=1e-12)


def test_sigma_one_gives_unit_weight(rng):
    X = rng.standard_normal((8, 2))
    S = sparse_similarity(pairwise_sq_dists(X), 1)
    assert np.all(np.count_nonzero(S.A, axis=1) == 1)
    assert np.allclose(S.A.max(axis=1), 1.0)


def test_degenerate_ties_fall_back_to_uniform():
    # regular simplex vertices: every off-diagonal distance equal
    X = np.eye(5)
    S = sparse_similarity(pairwise_sq_dists(X), 3)
    assert np.allclose(S.A[S.A > 0], 1 / 3)
    assert np.all(np.count_nonzero(S.A, axis=1) == 3)
    # stable tie-break: lowest indices win
    assert S.neighbors[0].tolist() == [1, 2, 3]


def test_sigma_range():
    C = pairwise_sq_dists(np.arange(5.0))
    with pytest.raises(ValueError):
        sparse_similarity(C, 4)
    with pytest.raises(ValueError):
        sparse_similarity(C, 0)
    C[0, 1] = np.nan
    with pytest.raises(ValueError):
        sparse_similarity(C, 2)


def test_duplicate_points_are_nearest(rng):
    X = rng.standard_normal((10, 3))
    X[4] = X[2]
    S = sparse_similarity(pairwise_sq_dists(X), 3)
    assert S.A[2].argmax() == 4 and S.A[4].argmax() == 2


def test_incidence_from_row():
    A = np.array([[0, 0.7, 0.3], [0.5, 0, 0.5], [0.2, 0.8, 0]])
    from mhscg.hypergraph import SimilarityMatrix
    S = SimilarityMatrix(A=A, neighbors=np.array([[1, 2], [0, 2], [1, 0]]), sigma=2)
    H = build_incidence(S).incidence
    assert H[:, 0].tolist() == [1, 0.7, 0.3]
    assert np.allclose(H.sum(axis=0), 2.0)


def test_chain_sigma_one():
    _, hg, _ = _pipeline(np.array([0.0, 1.0, 3.0, 7.0]), 1)
    assert hg.incidence[:, 0].tolist() == [1, 1, 0, 0]
    assert hg.edge_degrees[0] == 2


def test_degrees_small_example():
    dv, de = degrees(np.array([[1, 0.5], [0.5, 1]]), np.eye(2))
    assert dv.tolist() == [1.5, 1.5] and de.tolist() == [1.5, 1.5]


def test_degrees_match_loops(rng):
    H = rng.random((7, 5))
    w = rng.uniform(0.5, 2.0, 5)
    dv, de = degrees(H, np.diag(w))
    for v in range(7):
        assert abs(dv[v] - sum(w[e] * H[v, e] for e in range(5))) <= 1e-12
    for e in range(5):
        assert abs(de[e] - sum(H[v, e] for v in range(7))) <= 1e-12


def test_degrees_reject_zero_vertex():
    with pytest.raises(ValueError):
        degrees(np.array([[1.0, 0.0], [0.0, 0.0]]), np.ones(2))


def test_laplacian_invariants(rng):
    X = rng.standard_normal((30, 3))
    _, hg, L = _pipeline(X, 5)
    assert np.max(np.abs(L.theta + L.delta - np.eye(30))) <= 1e-15
    ev = np.linalg.eigvalsh(L.theta)
    assert ev.min() >= -1e-10 and ev.max() <= 1 + 1e-10
    u = np.sqrt(hg.vertex_degrees)
    assert np.max(np.abs(L.theta @ u - u)) <= 1e-10
    assert np.linalg.eigvalsh(L.delta).min() == pytest.approx(0.0, abs=1e-10)


def test_laplacian_singular_degree():
    with pytest.raises(ValueError):
        laplacian(np.eye(2), np.ones(2), np.array([1.0, 0.0]), np.ones(2))


def test_permutation_equivariance(rng):
    X = rng.standard_normal((15, 2))
    perm = rng.permutation(15)
    L = view_laplacian(X, 4)
    Lp = view_laplacian(X[perm], 4)
    assert np.allclose(Lp.theta, L.theta[np.ix_(perm, perm)], atol=1e-12)


def test_disconnected_blobs_give_block_theta():
    X = np.concatenate([np.arange(6.0), 100 + np.arange(6.0)])[:, None]
    L = view_laplacian(X, 3)
    assert np.all(L.theta[:6, 6:] == 0)
    ev = np.linalg.eigvalsh(L.theta)
    assert np.sum(ev > 1 - 1e-10) == 2


@settings(max_examples=40, deadline=None)
@given(
    arrays(np.float64, st.tuples(st.integers(6, 25), st.integers(1, 4)),
           elements=st.floats(-100, 100, allow_nan=False)),
    st.integers(1, 10),
)
def test_similarity_rows_are_stochastic(X, sigma):
    n = X.shape[0]
    sigma = min(sigma, n - 2)
    S = sparse_similarity(pairwise_sq_dists(X), sigma)
    assert np.allclose(S.A.sum(axis=1), 1.0, atol=1e-10)
    assert np.all(np.diag(S.A) == 0) and S.A.min() >= 0
    assert np.all(np.count_nonzero(S.A, axis=1) <= sigma)
    H = build_incidence(S).incidence
    assert np.allclose(H.sum(axis=0), 2.0, atol=1e-10)


def test_generic_rows_have_exactly_sigma_nonzeros(rng):
    X = rng.standard_normal((40, 3))
    for sigma in (1, 4, 10, 38):
        S = sparse_similarity(pairwise_sq_dists(X), sigma)
        assert np.all(np.count_nonzero(S.A, axis=1) == sigma)
