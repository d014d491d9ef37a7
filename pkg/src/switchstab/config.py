"""Numerical tolerances shared across the toolkit.

Every solver and classifier tolerance lives in this one frozen record so a
single object documents (and, if needed, overrides) the numeric contract.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # linear algebra
    symmetry_rtol: float = 1e-9          # max-norm asymmetry allowed in "symmetric" inputs
    eig_residual_rtol: float = 1e-10     # ||M - Q L Q^T||_F bound for symmetric eigensolves
    eig_det_rtol: float = 1e-6           # |det(M - lambda I)| bound for general eigenvalues
    lyapunov_residual_rtol: float = 1e-8
    lyapunov_singular_atol: float = 1e-12  # |lambda_i + lambda_j| below this is singular

    # partitions and switching laws
    boundary_rtol: float = 1e-9          # region-score gap for active-piece membership
    tie_rtol: float = 1e-9               # score gap treated as a tie in the switching law
    weight_atol: float = 1e-12           # convex-weight validation
    active_weight_atol: float = 1e-9     # sliding coefficient below this is inactive

    # sliding surfaces
    on_surface_rtol: float = 1e-8        # |s(x)| allowed when querying a surface point
    tangency_rtol: float = 1e-12         # normal-component gap treated as tangency

    # certification
    inconclusive_rtol: float = 1e-7      # strict-inequality margins inside this band
    definite_margin_rtol: float = 1e-9   # eigenvalue margin for matrix inequalities


DEFAULT = Tolerances()
