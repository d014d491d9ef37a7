"""Piecewise smooth candidate Lyapunov functions and their derivatives.

Four concrete families are supported:

* ``smooth_quadratic``    V(x) = x'Px
* ``smooth_polynomial``   V(x) = polynomial, gradient derived term-wise
* ``piecewise_quadratic`` V(x) = x'P_j x on the region where x'H_j x is
  largest among the region forms
* ``pointwise_min`` / ``pointwise_max``  V(x) = min_j / max_j x'P_j x

All families are continuous, vanish at the origin, and have one-sided
directional derivatives everywhere.  Piece indices are 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .linalg import DimensionError, as_matrix, as_vector
from .model import (
    Monomial,
    SchemaError,
    poly_eval,
    poly_gradient,
    poly_normalize,
)

__all__ = [
    "DiscontinuityError",
    "PieceInactiveError",
    "Pwsclf",
    "RateFunction",
    "smooth_quadratic",
    "smooth_polynomial",
    "piecewise_quadratic",
    "pointwise_min",
    "pointwise_max",
    "quadratic_rate",
    "polynomial_rate",
    "rate_value",
    "value",
    "active_pieces",
    "piece_gradient",
    "piece_directional_derivative",
    "directional_derivative",
    "load_clf",
    "dump_clf",
]

SMOOTH_KINDS = ("smooth_quadratic", "smooth_polynomial")
QUADRATIC_PIECE_KINDS = ("smooth_quadratic", "piecewise_quadratic", "pointwise_min", "pointwise_max")


class DiscontinuityError(ValueError):
    """Active pieces disagree on the value: the pieces do not glue continuously."""


class PieceInactiveError(ValueError):
    """The requested piece index is not in J(x)."""


@dataclass(frozen=True)
class Pwsclf:
    kind: str
    pieces: tuple[np.ndarray, ...] = ()          # P_j, symmetric
    regions: tuple[np.ndarray, ...] = ()         # H_j for piecewise_quadratic
    poly: tuple[Monomial, ...] = ()
    gradient: tuple[tuple[Monomial, ...], ...] = ()
    dimension: int = 0
    boundary_tolerance: float = DEFAULT.boundary_rtol

    @property
    def m(self) -> int:
        """Number of smooth pieces."""
        if self.kind in SMOOTH_KINDS:
            return 1
        return len(self.pieces)


def _sym(p) -> np.ndarray:
    p = as_matrix(p, square=True)
    if np.max(np.abs(p - p.T), initial=0.0) > DEFAULT.symmetry_rtol * (
        1.0 + np.max(np.abs(p), initial=0.0)
    ):
        raise SchemaError("piece/region matrices must be symmetric")
    return 0.5 * (p + p.T)


def smooth_quadratic(p, boundary_tolerance: float = DEFAULT.boundary_rtol) -> Pwsclf:
    p = _sym(p)
    return Pwsclf(
        kind="smooth_quadratic",
        pieces=(p,),
        dimension=p.shape[0],
        boundary_tolerance=boundary_tolerance,
    )


def smooth_polynomial(poly, dimension: int | None = None,
                      boundary_tolerance: float = DEFAULT.boundary_rtol) -> Pwsclf:
    """Polynomial V with its gradient derived by term-wise differentiation."""
    terms = []
    for m in poly:
        if not isinstance(m, Monomial):
            m = Monomial(float(m[0]), tuple(m[1]))
        terms.append(m)
    if not terms:
        raise SchemaError("smooth_polynomial needs at least one monomial")
    n = dimension if dimension is not None else len(terms[0].exponents)
    for m in terms:
        if len(m.exponents) != n:
            raise SchemaError("all monomials must have one exponent per coordinate")
        if m.degree == 0 and m.coeff != 0.0:
            raise SchemaError("constant monomial violates V(0) = 0")
    norm = poly_normalize(terms)
    return Pwsclf(
        kind="smooth_polynomial",
        poly=norm,
        gradient=poly_gradient(norm, n),
        dimension=n,
        boundary_tolerance=boundary_tolerance,
    )


def piecewise_quadratic(pieces, regions,
                        boundary_tolerance: float = DEFAULT.boundary_rtol) -> Pwsclf:
    ps = tuple(_sym(p) for p in pieces)
    hs = tuple(_sym(h) for h in regions)
    if len(ps) != len(hs) or not ps:
        raise SchemaError("piecewise_quadratic needs equally many pieces and regions")
    n = ps[0].shape[0]
    for m in ps + hs:
        if m.shape[0] != n:
            raise DimensionError("all pieces and regions must share one dimension")
    return Pwsclf(
        kind="piecewise_quadratic",
        pieces=ps,
        regions=hs,
        dimension=n,
        boundary_tolerance=boundary_tolerance,
    )


def _pointwise(kind: str, pieces, boundary_tolerance: float) -> Pwsclf:
    ps = tuple(_sym(p) for p in pieces)
    if not ps:
        raise SchemaError(f"{kind} needs at least one piece")
    n = ps[0].shape[0]
    for p in ps:
        if p.shape[0] != n:
            raise DimensionError("all pieces must share one dimension")
    return Pwsclf(kind=kind, pieces=ps, dimension=n, boundary_tolerance=boundary_tolerance)


def pointwise_min(pieces, boundary_tolerance: float = DEFAULT.boundary_rtol) -> Pwsclf:
    return _pointwise("pointwise_min", pieces, boundary_tolerance)


def pointwise_max(pieces, boundary_tolerance: float = DEFAULT.boundary_rtol) -> Pwsclf:
    return _pointwise("pointwise_max", pieces, boundary_tolerance)


# -- rate functions W --------------------------------------------------------


@dataclass(frozen=True)
class RateFunction:
    kind: str  # 'quadratic_norm' | 'polynomial'
    eta: float = 0.0
    poly: tuple[Monomial, ...] = ()


def quadratic_rate(eta: float) -> RateFunction:
    if eta <= 0:
        raise ValueError("eta must be positive")
    return RateFunction(kind="quadratic_norm", eta=float(eta))


def polynomial_rate(poly) -> RateFunction:
    terms = []
    for m in poly:
        if not isinstance(m, Monomial):
            m = Monomial(float(m[0]), tuple(m[1]))
        if m.degree == 0 and m.coeff != 0.0:
            raise SchemaError("constant monomial violates W(0) = 0")
        terms.append(m)
    return RateFunction(kind="polynomial", poly=poly_normalize(terms))


def rate_value(w: RateFunction, x) -> float:
    x = np.asarray(x, dtype=float)
    if w.kind == "quadratic_norm":
        return w.eta * float(x @ x)
    return poly_eval(w.poly, x)


# -- evaluation --------------------------------------------------------------


def _region_scores(v: Pwsclf, x: np.ndarray) -> np.ndarray:
    """Per-piece region score; the active pieces are the near-maximal ones."""
    if v.kind == "piecewise_quadratic":
        return np.array([x @ h @ x for h in v.regions])
    if v.kind == "pointwise_min":
        return np.array([-(x @ p @ x) for p in v.pieces])
    if v.kind == "pointwise_max":
        return np.array([x @ p @ x for p in v.pieces])
    return np.zeros(1)


def active_pieces(v: Pwsclf, x) -> set[int]:
    """J(x): pieces whose region closure contains x (1-based indices)."""
    x = as_vector(x, v.dimension)
    if v.kind in SMOOTH_KINDS:
        return {1}
    scores = _region_scores(v, x)
    gap = v.boundary_tolerance * (1.0 + float(x @ x))
    best = scores.max()
    return {j + 1 for j in range(scores.shape[0]) if scores[j] >= best - gap}


def _piece_value(v: Pwsclf, j: int, x: np.ndarray) -> float:
    if v.kind == "smooth_polynomial":
        return poly_eval(v.poly, x)
    return float(x @ v.pieces[j - 1] @ x)


def value(v: Pwsclf, x) -> float:
    """V(x).  On a piecewise_quadratic boundary the active pieces must agree."""
    x = as_vector(x, v.dimension)
    if v.kind == "smooth_polynomial":
        return poly_eval(v.poly, x)
    if v.kind == "smooth_quadratic":
        return float(x @ v.pieces[0] @ x)
    if v.kind == "pointwise_min":
        return min(float(x @ p @ x) for p in v.pieces)
    if v.kind == "pointwise_max":
        return max(float(x @ p @ x) for p in v.pieces)
    active = sorted(active_pieces(v, x))
    vals = [_piece_value(v, j, x) for j in active]
    if len(vals) > 1:
        # Region scaling can make the J(x) band wide in V units, so the
        # continuity tolerance is rescaled by ||P_j - P_k|| / ||H_j - H_k||.
        for a, va in zip(active, vals):
            for b, vb in zip(active, vals):
                if b <= a:
                    continue
                hn = np.linalg.norm(v.regions[a - 1] - v.regions[b - 1])
                pn = np.linalg.norm(v.pieces[a - 1] - v.pieces[b - 1])
                ratio = max(1.0, pn / hn) if hn > 0 else 1.0
                tol = 100.0 * v.boundary_tolerance * (1.0 + float(x @ x)) * ratio
                if abs(va - vb) > tol:
                    raise DiscontinuityError(
                        f"pieces {a} and {b} disagree at x={x.tolist()}: "
                        f"{va} vs {vb}"
                    )
    return vals[0]


def piece_gradient(v: Pwsclf, j: int, x) -> np.ndarray:
    """grad V_j(x); requires j in J(x) (closure extension is the same formula)."""
    x = as_vector(x, v.dimension)
    if j not in active_pieces(v, x):
        raise PieceInactiveError(f"piece {j} is not active at x={x.tolist()}")
    if v.kind == "smooth_polynomial":
        return np.array([poly_eval(g, x) for g in v.gradient])
    return 2.0 * (v.pieces[j - 1] @ x)


def piece_directional_derivative(v: Pwsclf, j: int, x, eta) -> float:
    eta = as_vector(eta, v.dimension)
    return float(piece_gradient(v, j, x) @ eta)


def directional_derivative(v: Pwsclf, x, eta) -> float:
    """One-sided derivative DV(x; eta) = lim_{d->0+} (V(x + d eta) - V(x)) / d.

    For pointwise min/max this is the min/max of the active piece derivatives.
    For piecewise_quadratic it is the derivative of the piece whose region the
    ray x + d*eta enters, selected by the first-order region-score slopes
    2 x'H_j eta, by the second-order terms eta'H_j eta on ties, and by lowest
    index last.
    """
    x = as_vector(x, v.dimension)
    eta = as_vector(eta, v.dimension)
    if v.kind in SMOOTH_KINDS:
        return piece_directional_derivative(v, 1, x, eta)
    if not x.any():
        return 0.0  # every piece is quadratic: gradient vanishes at the origin
    active = sorted(active_pieces(v, x))
    if len(active) == 1:
        return piece_directional_derivative(v, active[0], x, eta)
    rows = [piece_directional_derivative(v, j, x, eta) for j in active]
    if v.kind == "pointwise_min":
        return min(rows)
    if v.kind == "pointwise_max":
        return max(rows)
    # piecewise_quadratic: follow the region the ray enters
    slopes = np.array([2.0 * (x @ v.regions[j - 1] @ eta) for j in active])
    xn = float(np.sqrt(x @ x))
    en = float(np.sqrt(eta @ eta))
    gap1 = v.boundary_tolerance * (1.0 + xn * en)
    cands = [k for k in range(len(active)) if slopes[k] >= slopes.max() - gap1]
    if len(cands) > 1:
        curv = np.array([eta @ v.regions[active[k] - 1] @ eta for k in cands])
        gap2 = v.boundary_tolerance * (1.0 + en * en)
        cands = [cands[k] for k in range(len(cands)) if curv[k] >= curv.max() - gap2]
    return rows[cands[0]]


# -- document schema ---------------------------------------------------------
#
# {"kind": "smooth_quadratic", "P": [[...]]}
# {"kind": "smooth_polynomial", "poly": [{"coeff": c, "exponents": [...]}, ...]}
# {"kind": "piecewise_quadratic", "P": [[[...]], ...], "H": [[[...]], ...]}
# {"kind": "pointwise_min" | "pointwise_max", "P": [[[...]], ...]}
# all plus optional "boundary_tolerance".


def load_clf(document) -> Pwsclf:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"CLF document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("CLF document must be a JSON object")
    kind = document.get("kind")
    tol = float(document.get("boundary_tolerance", DEFAULT.boundary_rtol))
    if tol <= 0:
        raise SchemaError("boundary_tolerance must be positive")
    try:
        if kind == "smooth_quadratic":
            return smooth_quadratic(document["P"], tol)
        if kind == "smooth_polynomial":
            terms = [Monomial(float(t["coeff"]), tuple(t["exponents"])) for t in document["poly"]]
            return smooth_polynomial(terms, boundary_tolerance=tol)
        if kind == "piecewise_quadratic":
            return piecewise_quadratic(document["P"], document["H"], tol)
        if kind == "pointwise_min":
            return pointwise_min(document["P"], tol)
        if kind == "pointwise_max":
            return pointwise_max(document["P"], tol)
    except KeyError as exc:
        raise SchemaError(f"CLF document is missing field {exc}") from None
    raise SchemaError(f"unknown CLF kind {kind!r}")


def dump_clf(v: Pwsclf) -> dict:
    doc: dict = {"kind": v.kind, "boundary_tolerance": v.boundary_tolerance}
    if v.kind == "smooth_polynomial":
        doc["poly"] = [{"coeff": m.coeff, "exponents": list(m.exponents)} for m in v.poly]
    elif v.kind == "smooth_quadratic":
        doc["P"] = v.pieces[0].tolist()
    else:
        doc["P"] = [p.tolist() for p in v.pieces]
        if v.kind == "piecewise_quadratic":
            doc["H"] = [h.tolist() for h in v.regions]
    return doc
