import numpy as np
import pytest

from switchstab.linalg import (
    DimensionError,
    NotHurwitzError,
    SingularLyapunovError,
    SymmetryError,
    eig_general,
    eig_symmetric,
    is_hurwitz,
    is_positive_definite,
    lyapunov_solve,
)

A1_EX1 = np.array([[-3.0, -1.0], [12.0, 2.0]])
A4_EX3 = np.array([[0.0, 1.0], [1.0, -1.0]])
P1_EX3 = np.array([[2.0, 0.0], [0.0, 1.0]])
P2_EX3 = np.array([[1.0, -1.0], [-1.0, 4.0]])


def test_eig_symmetric_identity():
    w, q = eig_symmetric(np.eye(2))
    assert np.allclose(w, [1.0, 1.0])
    assert np.allclose(q @ q.T, np.eye(2))


def test_eig_symmetric_diagonal_sorted_descending():
    w, _ = eig_symmetric(P1_EX3)
    assert np.allclose(w, [2.0, 1.0])


def test_eig_symmetric_offdiagonal():
    # characteristic polynomial lambda^2 - 1 = 0 by hand
    w, _ = eig_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [1.0, -1.0])


def test_eig_symmetric_rejects_asymmetric():
    with pytest.raises(SymmetryError):
        eig_symmetric(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_symmetric_rejects_nonsquare():
    with pytest.raises(DimensionError):
        eig_symmetric(np.zeros((2, 3)))


def test_eig_general_stable_matrix():
    # trace -1, det 6: both real parts negative by the 2x2 criterion
    w = eig_general(A1_EX1)
    assert np.max(w.real) < 0
    assert abs(w.sum().real - (-1.0)) < 1e-10


def test_eig_general_saddle():
    # det = -1 < 0: one eigenvalue in each half plane
    w = eig_general(A4_EX3)
    assert w.real[0] > 0 > w.real[-1]


def test_eig_general_zero_matrix():
    assert np.allclose(eig_general(np.zeros((3, 3))), 0.0)


def test_eig_general_dimension_cap():
    with pytest.raises(DimensionError):
        eig_general(np.eye(17))


def test_is_positive_definite_examples():
    assert is_positive_definite(np.eye(2), 0.0)
    # leading minors 1 and 3 are positive
    assert is_positive_definite(P2_EX3, 0.0)
    assert not is_positive_definite(np.array([[0.0, 1.0], [1.0, 0.0]]), 0.0)


def test_is_positive_definite_margin():
    assert not is_positive_definite(np.eye(2), 1.0)
    assert is_positive_definite(2.0 * np.eye(2), 1.0)


def test_lyapunov_identity_case():
    # A = -I gives A'P + PA = -2P, so P = Q/2
    p = lyapunov_solve(-np.eye(3), np.eye(3))
    assert np.allclose(p, 0.5 * np.eye(3))


def test_lyapunov_residual_on_example_matrix():
    q = np.eye(2)
    p = lyapunov_solve(A1_EX1, q)
    resid = np.linalg.norm(A1_EX1.T @ p + p @ A1_EX1 + q)
    assert resid <= 1e-8 * (1.0 + np.linalg.norm(q))
    assert np.allclose(p, p.T)


def test_lyapunov_singular_rotation():
    # eigenvalues +-i sum to zero
    with pytest.raises(SingularLyapunovError):
        lyapunov_solve(np.array([[0.0, 1.0], [-1.0, 0.0]]), np.eye(2))


def test_lyapunov_not_hurwitz():
    with pytest.raises(NotHurwitzError):
        lyapunov_solve(np.array([[1.0, 0.0], [0.0, -2.0]]), np.eye(2))


def test_lyapunov_requires_symmetric_q():
    with pytest.raises(SymmetryError):
        lyapunov_solve(-np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))


# -- property loops ------------------------------------------------------------


def test_eig_symmetric_reconstruction_random():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(1, 9))
        g = rng.standard_normal((n, n))
        m = 0.5 * (g + g.T)
        w, q = eig_symmetric(m)
        resid = np.linalg.norm(m - q @ np.diag(w) @ q.T)
        assert resid <= 1e-10 * (1.0 + np.linalg.norm(m))
        assert np.all(np.diff(w) <= 1e-12)


def test_eig_general_trace_det_random():
    rng = np.random.default_rng(2)
    for _ in range(300):
        n = int(rng.integers(1, 5))
        m = rng.standard_normal((n, n))
        w = eig_general(m)
        tr, det = np.trace(m), np.linalg.det(m)
        assert abs(w.sum() - tr) <= 1e-8 * (1.0 + abs(tr))
        assert abs(np.prod(w) - det) <= 1e-6 * (1.0 + abs(det))


def test_lyapunov_residual_random_hurwitz():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        m = rng.standard_normal((n, n))
        rho = np.max(np.abs(np.linalg.eigvals(m)))
        a = m - (1.0 + rho) * np.eye(n)
        assert is_hurwitz(a)
        g = rng.standard_normal((n, n))
        q = 0.5 * (g + g.T)
        p = lyapunov_solve(a, q)
        resid = np.linalg.norm(a.T @ p + p @ a + q)
        assert resid <= 1e-8 * (1.0 + np.linalg.norm(q))


def test_positive_definite_matches_cholesky_oracle():
    rng = np.random.default_rng(4)
    agree = 0
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        g = rng.standard_normal((n, n))
        m = 0.5 * (g + g.T) + rng.uniform(-1, 1) * np.eye(n)
        try:
            np.linalg.cholesky(m)
            oracle = True
        except np.linalg.LinAlgError:
            oracle = False
        got = is_positive_definite(m, 0.0)
        # borderline matrices may disagree within roundoff of singularity
        w = np.linalg.eigvalsh(m)
        if abs(w[0]) > 1e-10:
            assert got == oracle
            agree += 1
    assert agree > 900
