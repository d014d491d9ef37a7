"""Small dense linear algebra used by every other module.

Matrices and vectors are plain ``numpy.float64`` arrays; spectra of
nonsymmetric matrices are complex arrays.  Dimensions here are desk scale
(n <= 16), so the solvers favour clarity and hard validation over speed.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT, Tolerances

__all__ = [
    "DimensionError",
    "SymmetryError",
    "ConvergenceError",
    "SingularLyapunovError",
    "NotHurwitzError",
    "as_matrix",
    "as_vector",
    "eig_symmetric",
    "eig_general",
    "is_positive_definite",
    "is_hurwitz",
    "lyapunov_solve",
]

MAX_DIM = 16


class DimensionError(ValueError):
    pass


class SymmetryError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class SingularLyapunovError(ValueError):
    """A has an eigenvalue pair with lambda_i + lambda_j = 0."""


class NotHurwitzError(ValueError):
    pass


def as_matrix(a, square: bool = False) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    return m


def as_vector(a, dim: int | None = None) -> np.ndarray:
    v = np.asarray(a, dtype=float).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"expected a vector of length {dim}, got {v.shape[0]}")
    if not np.isfinite(v).all():
        raise ValueError("vector entries must be finite")
    return v


def _require_symmetric(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    gap = np.max(np.abs(m - m.T)) if m.size else 0.0
    if gap > tol.symmetry_rtol * (1.0 + np.max(np.abs(m), initial=0.0)):
        raise SymmetryError(f"matrix is not symmetric (asymmetry {gap:.3e})")
    return 0.5 * (m + m.T)


def eig_symmetric(m, tol: Tolerances = DEFAULT) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix."""
    a = _require_symmetric(as_matrix(m, square=True), tol)
    w, q = np.linalg.eigh(a)
    w, q = w[::-1].copy(), q[:, ::-1].copy()
    resid = np.linalg.norm(a - q @ np.diag(w) @ q.T)
    if resid > tol.eig_residual_rtol * (1.0 + np.linalg.norm(a)):
        raise ConvergenceError(f"eigendecomposition residual too large ({resid:.3e})")
    return w, q


def eig_general(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    """All eigenvalues of a general square matrix, sorted by descending real part."""
    a = as_matrix(m, square=True)
    n = a.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"matrix dimension {n} exceeds supported maximum {MAX_DIM}")
    try:
        w = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(str(exc)) from exc
    order = np.lexsort((-w.imag, -w.real))
    w = w[order]
    scale = (1.0 + np.linalg.norm(a)) ** n
    for lam in w:
        if abs(np.linalg.det(a - lam * np.eye(n))) > tol.eig_det_rtol * scale:
            raise ConvergenceError(f"eigenvalue {lam} fails the determinant check")
    return w


def is_positive_definite(m, margin: float = 0.0, tol: Tolerances = DEFAULT) -> bool:
    """True iff the smallest eigenvalue of symmetric ``m`` exceeds ``margin``."""
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    w, _ = eig_symmetric(m, tol)
    return bool(w[-1] > margin)


def is_hurwitz(a, tol: Tolerances = DEFAULT) -> bool:
    return bool(np.max(eig_general(a, tol).real) < 0.0)


def lyapunov_solve(a, q, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solve ``A^T P + P A + Q = 0`` for symmetric P, A Hurwitz.

    The equation is vectorised into an n^2 x n^2 dense linear system; the
    O(n^6) cost is irrelevant at n <= 16 and keeps the solve exactly
    reproducible.
    """
    a = as_matrix(a, square=True)
    qm = _require_symmetric(as_matrix(q, square=True), tol)
    n = a.shape[0]
    if qm.shape[0] != n:
        raise DimensionError("A and Q must have the same dimension")
    spectrum = eig_general(a, tol)
    scale = 1.0 + np.max(np.abs(spectrum))
    for i in range(n):
        for j in range(i, n):
            if abs(spectrum[i] + spectrum[j]) <= tol.lyapunov_singular_atol * scale:
                raise SingularLyapunovError(
                    f"eigenvalue pair {spectrum[i]}, {spectrum[j]} sums to zero"
                )
    if np.max(spectrum.real) >= 0.0:
        raise NotHurwitzError("A must be Hurwitz")
    eye = np.eye(n)
    # vec is column-major so that kron(I, A^T) vec(P) = vec(A^T P).
    coeff = np.kron(eye, a.T) + np.kron(a.T, eye)
    p = np.linalg.solve(coeff, -qm.reshape(-1, order="F")).reshape((n, n), order="F")
    p = 0.5 * (p + p.T)
    resid = np.linalg.norm(a.T @ p + p @ a + qm)
    if resid > tol.lyapunov_residual_rtol * (1.0 + np.linalg.norm(qm)):
        raise ConvergenceError(f"Lyapunov residual too large ({resid:.3e})")
    return p
