"""Switching-law construction from a candidate Lyapunov function.

The induced law picks, inside each smooth piece of V, the subsystem whose
field gives the steepest descent of the piece gradient; on decision
boundaries the least index wins.  Next to the point queries (``nu``, tie
sets) the module provides the limit-set probes used by the boundary
stability condition:

* ``sliding_candidate_modes``  I_sm(x), the modes whose decision-region
  boundary contains x,
* ``boundary_limit_modes``     M_j(x), the modes the law selects arbitrarily
  close to x from inside piece j,

both realised by deterministic ring probing at shrinking radii, plus the
regularity probe and Filippov sliding coefficients on explicit surfaces.

``RegionLaw`` covers laws given directly by region indicator functions
(mode = argmax of the indicators) so hand-specified piecewise systems can be
simulated and analysed with the same machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clf as clfmod
from .config import DEFAULT
from .linalg import as_matrix, as_vector
from .model import (
    SchemaError,
    SwitchedSystem,
    eval_field,
    poly_add,
    poly_eval,
    poly_from_linear_row,
    poly_gradient,
    poly_mul,
    poly_normalize,
    poly_scale,
    Monomial,
)

__all__ = [
    "DegenerateDirectionError",
    "TangencyError",
    "OffSurfaceError",
    "ScalarFn",
    "SlidingSurface",
    "SlidingResult",
    "SwitchingLaw",
    "RegionLaw",
    "load_region_law",
    "sliding_candidate_modes",
    "boundary_limit_modes",
    "is_regular",
    "sliding_coefficients",
    "candidate_surfaces",
]


class DegenerateDirectionError(ValueError):
    """An active sliding mode has a vanishing field at the probe point."""


class TangencyError(ValueError):
    """Both fields are tangent to the surface: coefficients are undefined."""


class OffSurfaceError(ValueError):
    pass


# -- scalar functions with exact gradients -----------------------------------


@dataclass(frozen=True)
class ScalarFn:
    """s(x) given as x'Sx, a'x, or a monomial list; gradient is closed form."""

    kind: str  # 'quadratic' | 'linear' | 'polynomial'
    S: np.ndarray | None = None
    a: np.ndarray | None = None
    poly: tuple = ()
    grad: tuple = ()

    def value(self, x: np.ndarray) -> float:
        if self.kind == "quadratic":
            return float(x @ self.S @ x)
        if self.kind == "linear":
            return float(self.a @ x)
        return poly_eval(self.poly, x)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "quadratic":
            return 2.0 * (self.S @ x)
        if self.kind == "linear":
            return self.a.copy()
        return np.array([poly_eval(g, x) for g in self.grad])


def quadratic_fn(s) -> ScalarFn:
    s = as_matrix(s, square=True)
    return ScalarFn(kind="quadratic", S=0.5 * (s + s.T))


def linear_fn(a) -> ScalarFn:
    return ScalarFn(kind="linear", a=as_vector(a))


def polynomial_fn(poly, dimension: int) -> ScalarFn:
    norm = poly_normalize(poly)
    return ScalarFn(kind="polynomial", poly=norm, grad=poly_gradient(norm, dimension))


@dataclass(frozen=True)
class SlidingSurface:
    """Codimension-1 surface {s(x) = 0} with optional fixed side modes.

    ``side_modes = (p, q)`` means mode p rules where s < 0 and q where s > 0;
    when omitted the sides are determined by probing the law along the
    surface normal.
    """

    fn: ScalarFn
    side_modes: tuple[int, int] | None = None


@dataclass(frozen=True)
class SlidingResult:
    alpha: float               # weight of the s<0 mode p in alpha*f_p + (1-alpha)*f_q
    attractive: bool
    crossing: bool             # alpha outside [0,1]: no sliding, trajectory crosses
    modes: tuple[int, int]     # (p, q)
    velocity: np.ndarray | None
    normal: np.ndarray


# -- probe directions ---------------------------------------------------------

_DIRECTION_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _probe_directions(n: int, count: int) -> np.ndarray:
    key = (n, count)
    cached = _DIRECTION_CACHE.get(key)
    if cached is not None:
        return cached
    if n == 1:
        dirs = np.array([[1.0], [-1.0]])
    elif n == 2:
        # half-step angular offset keeps probes off the coordinate axes
        ang = (np.arange(count) + 0.5) * (2.0 * np.pi / count)
        dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        rng = np.random.Generator(np.random.PCG64(20240801))
        g = rng.standard_normal((count, n))
        dirs = g / np.linalg.norm(g, axis=1, keepdims=True)
    _DIRECTION_CACHE[key] = dirs
    return dirs


# -- the induced law ----------------------------------------------------------


class SwitchingLaw:
    """The steepest-descent switching law induced by a candidate V."""

    def __init__(
        self,
        system: SwitchedSystem,
        clf: clfmod.Pwsclf,
        tie_tolerance: float = DEFAULT.tie_rtol,
        probe_radius_factor: float = 1.0,
        probe_count: int = 64,
    ):
        if clf.dimension != system.dimension:
            raise SchemaError("system and CLF dimensions disagree")
        if tie_tolerance <= 0 or probe_radius_factor <= 0:
            raise ValueError("tolerances must be positive")
        if probe_count < 8:
            raise ValueError("probe_count must be at least 8")
        self.system = system
        self.clf = clf
        self.tie_tolerance = tie_tolerance
        self.probe_radius_factor = probe_radius_factor
        self.probe_count = probe_count
        self._pair_fns: dict[tuple[int, int, int], ScalarFn] = {}

    @property
    def dimension(self) -> int:
        return self.system.dimension

    @property
    def modes(self) -> int:
        return self.system.modes

    def pieces(self, x) -> set[int]:
        return clfmod.active_pieces(self.clf, x)

    def _fields(self, x: np.ndarray) -> list[np.ndarray]:
        return [f(x) for f in self.system.subsystems]

    def score_row(self, j: int, x) -> np.ndarray:
        """<grad V_j(x), f_i(x)> for every mode i."""
        x = as_vector(x, self.dimension)
        g = clfmod.piece_gradient(self.clf, j, x)
        return np.array([g @ f for f in self._fields(x)])

    def _tie_gap(self, x: np.ndarray, fields: list[np.ndarray]) -> float:
        fmax = max(float(np.sqrt(f @ f)) for f in fields) if fields else 0.0
        return self.tie_tolerance * (1.0 + float(x @ x)) * (1.0 + fmax)

    def minimizer_sets(self, x) -> dict[int, set[int]]:
        """Per active piece j, the tied argmin modes of <grad V_j, f_i>."""
        x = as_vector(x, self.dimension)
        fields = self._fields(x)
        gap = self._tie_gap(x, fields)
        out: dict[int, set[int]] = {}
        for j in sorted(clfmod.active_pieces(self.clf, x)):
            g = clfmod.piece_gradient(self.clf, j, x)
            row = np.array([g @ f for f in fields])
            best = row.min()
            out[j] = {i + 1 for i in range(row.shape[0]) if row[i] <= best + gap}
        return out

    def tie_set(self, x) -> set[int]:
        out: set[int] = set()
        for s in self.minimizer_sets(x).values():
            out |= s
        return out

    def mode(self, x) -> int:
        """nu(x): the unique minimizer if any, otherwise the least tied index."""
        union = self.tie_set(x)
        return min(union)

    nu = mode

    def selection_scores(self, x) -> np.ndarray:
        """Decision functional per mode (lower wins), on the best active piece."""
        x = as_vector(x, self.dimension)
        j = self._best_piece(x)
        return self.score_row(j, x)

    def _best_piece(self, x: np.ndarray) -> int:
        if self.clf.kind in clfmod.SMOOTH_KINDS:
            return 1
        scores = clfmod._region_scores(self.clf, x)
        return int(np.argmax(scores)) + 1

    def pair_fn(self, j: int, p: int, q: int) -> ScalarFn:
        """<grad V_j(x), f_p(x) - f_q(x)> as a closed-form scalar function."""
        key = (j, p, q)
        fn = self._pair_fns.get(key)
        if fn is None:
            fn = _mode_pair_fn(self, j, p, q)
            self._pair_fns[key] = fn
        return fn

    def switch_margin(self, x, held: int, best: int) -> tuple[float, np.ndarray]:
        """(score_held - score_best, its spatial gradient) at x."""
        x = as_vector(x, self.dimension)
        fn = self.pair_fn(self._best_piece(x), held, best)
        return fn.value(x), fn.gradient(x)


class RegionLaw:
    """A law given directly by region indicators: nu(x) = argmax_i r_i(x)."""

    def __init__(
        self,
        system: SwitchedSystem,
        regions,
        tie_tolerance: float = DEFAULT.tie_rtol,
        probe_radius_factor: float = 1.0,
        probe_count: int = 64,
    ):
        regions = tuple(regions)
        if len(regions) != system.modes:
            raise SchemaError("need one region function per mode")
        self.system = system
        self.regions = regions
        self.tie_tolerance = tie_tolerance
        self.probe_radius_factor = probe_radius_factor
        self.probe_count = probe_count

    @property
    def dimension(self) -> int:
        return self.system.dimension

    @property
    def modes(self) -> int:
        return self.system.modes

    def pieces(self, x) -> set[int]:
        return {1}

    def region_values(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        return np.array([r.value(x) for r in self.regions])

    def mode(self, x) -> int:
        if not isinstance(x, np.ndarray):
            x = as_vector(x, self.dimension)
        best, bv = 1, -np.inf
        for i, r in enumerate(self.regions):
            v = r.value(x)
            if v > bv:
                best, bv = i + 1, v
        return best

    nu = mode

    def tie_set(self, x) -> set[int]:
        x = as_vector(x, self.dimension)
        vals = self.region_values(x)
        gap = self.tie_tolerance * (1.0 + float(x @ x))
        best = vals.max()
        return {i + 1 for i in range(vals.shape[0]) if vals[i] >= best - gap}

    def selection_scores(self, x) -> np.ndarray:
        return -self.region_values(x)

    def switch_margin(self, x, held: int, best: int) -> tuple[float, np.ndarray]:
        x = as_vector(x, self.dimension)
        rb, rh = self.regions[best - 1], self.regions[held - 1]
        return rb.value(x) - rh.value(x), rb.gradient(x) - rh.gradient(x)


def load_region_law(document, system: SwitchedSystem, **kwargs) -> RegionLaw:
    """Region-law schema: {"regions": [{"kind": "linear", "a": [...]}
    | {"kind": "quadratic", "S": [[...]]} | {"kind": "polynomial", "poly": [...]}]}"""
    import json

    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"region-law document is not valid JSON: {exc}") from exc
    regions = document.get("regions")
    if not isinstance(regions, list):
        raise SchemaError("regions: expected a list")
    fns = []
    for i, doc in enumerate(regions):
        kind = doc.get("kind")
        if kind == "linear":
            fns.append(linear_fn(doc["a"]))
        elif kind == "quadratic":
            fns.append(quadratic_fn(doc["S"]))
        elif kind == "polynomial":
            terms = [Monomial(float(t["coeff"]), tuple(t["exponents"])) for t in doc["poly"]]
            fns.append(polynomial_fn(terms, system.dimension))
        else:
            raise SchemaError(f"regions[{i}].kind: unknown kind {kind!r}")
    return RegionLaw(system, fns, **kwargs)


# -- pair functions -----------------------------------------------------------


def _field_polys(system: SwitchedSystem, i: int):
    f = system.subsystems[i - 1]
    if f.kind == "polynomial":
        return f.components
    return tuple(poly_from_linear_row(f.matrix[k]) for k in range(system.dimension))


def _mode_pair_fn(law: SwitchingLaw, j: int, p: int, q: int) -> ScalarFn:
    system, v = law.system, law.clf
    n = system.dimension
    quad_piece = v.kind in clfmod.QUADRATIC_PIECE_KINDS
    if quad_piece and system.is_linear:
        pj = v.pieces[j - 1]
        ap = system.subsystems[p - 1].matrix
        aq = system.subsystems[q - 1].matrix
        return quadratic_fn((ap.T @ pj + pj @ ap) - (aq.T @ pj + pj @ aq))
    if quad_piece:
        grads = tuple(poly_from_linear_row(2.0 * v.pieces[j - 1][k]) for k in range(n))
    else:
        grads = v.gradient
    fp, fq = _field_polys(system, p), _field_polys(system, q)
    terms = []
    for k in range(n):
        diff = poly_add(fp[k], poly_scale(fq[k], -1.0))
        terms.append(poly_mul(grads[k], diff))
    return polynomial_fn(poly_add(*terms), n)


# -- ring probing -------------------------------------------------------------

_PROBE_EPS = (1e-4, 1e-5, 1e-6)


def sliding_candidate_modes(law, x) -> set[int]:
    """I_sm(x): modes observed by nu on a shrinking probe ring around x,
    merged with the tie set at x itself."""
    x = as_vector(x, law.dimension)
    dirs = _probe_directions(law.dimension, law.probe_count)
    base = law.probe_radius_factor * (1.0 + float(np.sqrt(x @ x)))
    # only the smallest radius is reported; the larger radii in _PROBE_EPS
    # exist for boundary_limit_modes, which may find thin pieces only there
    r = base * _PROBE_EPS[-1]
    smallest = {law.mode(x + r * d) for d in dirs}
    return smallest | law.tie_set(x)


def boundary_limit_modes(law, j: int, x) -> set[int]:
    """M_j(x): modes chosen by nu at probe points lying strictly inside
    piece j, reported at the smallest radius that hits the piece."""
    x = as_vector(x, law.dimension)
    if j not in law.pieces(x):
        raise clfmod.PieceInactiveError(f"piece {j} is not active at x={x.tolist()}")
    dirs = _probe_directions(law.dimension, law.probe_count)
    base = law.probe_radius_factor * (1.0 + float(np.sqrt(x @ x)))
    per_radius: list[set[int]] = []
    for eps in _PROBE_EPS:
        r = base * eps
        found: set[int] = set()
        for d in dirs:
            p = x + r * d
            if law.pieces(p) == {j}:
                found.add(law.mode(p))
        per_radius.append(found)
    for found in reversed(per_radius):  # prefer the smallest radius
        if found:
            return found
    return {law.mode(x)}


def is_regular(law, x, active_weights, atol: float = DEFAULT.active_weight_atol) -> bool:
    """Probe Definition-style regularity: every actively sliding mode i must
    be selected by nu just upstream along its own field, x - delta*f_i(x)."""
    x = as_vector(x, law.dimension)
    scale = 1.0 + float(np.sqrt(x @ x))
    for i, a in active_weights:
        if a <= atol:
            continue
        f = eval_field(law.system, i, x)
        fn = float(np.sqrt(f @ f))
        if fn == 0.0:
            raise DegenerateDirectionError(f"f_{i}(x) = 0 at x={x.tolist()}")
        d = f / fn
        ok = False
        for eps in (1e-3, 1e-4, 1e-5, 1e-6, 1e-7):
            r = eps * scale
            if law.mode(x - r * d) == i and law.mode(x - 0.5 * r * d) == i:
                ok = True
                break
        if not ok:
            return False
    return True


# -- sliding coefficients -----------------------------------------------------


def surface_side_modes(surface: SlidingSurface, law, x: np.ndarray) -> tuple[int, int]:
    if surface.side_modes is not None:
        return surface.side_modes
    if law is None:
        raise ValueError("surface has no fixed side modes and no law was given")
    n = surface.fn.gradient(x)
    nn = float(np.sqrt(n @ n))
    if nn == 0.0:
        raise TangencyError("surface gradient vanishes; cannot determine sides")
    eps = 1e-6 * (1.0 + float(np.sqrt(x @ x)))
    p = law.mode(x - eps * n / nn)
    q = law.mode(x + eps * n / nn)
    return p, q


def _solve_alpha(n: np.ndarray, fp: np.ndarray, fq: np.ndarray,
                 tol=DEFAULT) -> float:
    denom = float(n @ (fq - fp))
    scale = (1.0 + float(np.sqrt(n @ n))) * (
        1.0 + max(float(np.sqrt(fp @ fp)), float(np.sqrt(fq @ fq)))
    )
    if abs(denom) <= tol.tangency_rtol * scale:
        raise TangencyError("fields have equal normal components on the surface")
    return float(n @ fq) / denom


def equivalent_control(surface: SlidingSurface, system: SwitchedSystem,
                       p: int, q: int, x: np.ndarray) -> tuple[float, np.ndarray]:
    """(alpha, velocity) of the tangential combination, alpha clipped to [0,1].

    Internal helper for integrators: no on-surface precondition.
    """
    n = surface.fn.gradient(x)
    fp = eval_field(system, p, x)
    fq = eval_field(system, q, x)
    alpha = _solve_alpha(n, fp, fq)
    a = min(1.0, max(0.0, alpha))
    return alpha, a * fp + (1.0 - a) * fq


def sliding_coefficients(surface: SlidingSurface, system: SwitchedSystem, x,
                         law=None, tol=DEFAULT) -> SlidingResult:
    """Filippov coefficients on {s = 0}: solve <n(x), a f_p + (1-a) f_q> = 0.

    The surface is attractive when the p-side field points up-gradient and
    the q-side field points down-gradient; alpha outside [0,1] is reported as
    a crossing, not an error.
    """
    x = as_vector(x, system.dimension)
    s = surface.fn.value(x)
    if abs(s) > tol.on_surface_rtol * (1.0 + float(x @ x)):
        raise OffSurfaceError(f"|s(x)| = {abs(s):.3e} is too large; x is off the surface")
    n = surface.fn.gradient(x)
    if float(n @ n) == 0.0:
        raise TangencyError("surface gradient vanishes at x")
    p, q = surface_side_modes(surface, law, x)
    if p == q:
        raise ValueError(f"both sides of the surface select mode {p}; not a switching boundary")
    fp = eval_field(system, p, x)
    fq = eval_field(system, q, x)
    alpha = _solve_alpha(n, fp, fq, tol)
    attractive = bool(n @ fp > 0.0 and n @ fq < 0.0)
    crossing = not (0.0 <= alpha <= 1.0)
    velocity = None
    if not crossing:
        velocity = alpha * fp + (1.0 - alpha) * fq
    return SlidingResult(
        alpha=alpha,
        attractive=attractive,
        crossing=crossing,
        modes=(p, q),
        velocity=velocity,
        normal=n,
    )


# -- analytic surface construction --------------------------------------------


def candidate_surfaces(law) -> list[SlidingSurface]:
    """Closed-form codimension-1 switching surfaces of the law.

    For an induced law these are the piece boundaries (differences of region
    forms) plus the per-piece mode boundaries <grad V_j, f_p - f_q> = 0; for
    a region law the pairwise differences of the region indicators.  Sides
    are left dynamic except for region laws, where r_q - r_p < 0 exactly
    where mode p rules.
    """
    out: list[SlidingSurface] = []
    if isinstance(law, RegionLaw):
        fns = law.regions
        n = law.dimension
        for p in range(1, law.modes + 1):
            for q in range(p + 1, law.modes + 1):
                diff = _fn_difference(fns[q - 1], fns[p - 1], n)
                if diff is not None:
                    out.append(SlidingSurface(fn=diff, side_modes=(p, q)))
        return out
    v = law.clf
    if v.kind not in clfmod.SMOOTH_KINDS:
        forms = {
            "piecewise_quadratic": lambda j: v.regions[j - 1],
            "pointwise_min": lambda j: -v.pieces[j - 1],
            "pointwise_max": lambda j: v.pieces[j - 1],
        }[v.kind]
        for j in range(1, v.m + 1):
            for k in range(j + 1, v.m + 1):
                b = forms(j) - forms(k)
                if np.max(np.abs(b)) > 0.0:
                    out.append(SlidingSurface(fn=quadratic_fn(b)))
    for j in range(1, v.m + 1):
        for p in range(1, law.modes + 1):
            for q in range(p + 1, law.modes + 1):
                fn = law.pair_fn(j, p, q)
                if _fn_is_zero(fn):
                    continue
                out.append(SlidingSurface(fn=fn))
    return out


def _fn_difference(fq: ScalarFn, fp: ScalarFn, n: int) -> ScalarFn | None:
    if fq.kind == "quadratic" and fp.kind == "quadratic":
        b = fq.S - fp.S
        return quadratic_fn(b) if np.max(np.abs(b)) > 0.0 else None
    if fq.kind == "linear" and fp.kind == "linear":
        a = fq.a - fp.a
        return linear_fn(a) if np.max(np.abs(a)) > 0.0 else None
    pa = _fn_as_poly(fq, n)
    pb = poly_scale(_fn_as_poly(fp, n), -1.0)
    diff = poly_add(pa, pb)
    return polynomial_fn(diff, n) if diff else None


def _fn_as_poly(fn: ScalarFn, n: int):
    if fn.kind == "polynomial":
        return fn.poly
    if fn.kind == "linear":
        return poly_from_linear_row(fn.a)
    out = []
    for i in range(n):
        for k in range(n):
            c = fn.S[i, k]
            if c != 0.0:
                exps = [0] * n
                exps[i] += 1
                exps[k] += 1
                out.append(Monomial(float(c), tuple(exps)))
    return poly_normalize(out)


def _fn_is_zero(fn: ScalarFn) -> bool:
    if fn.kind == "quadratic":
        return bool(np.max(np.abs(fn.S)) == 0.0)
    if fn.kind == "linear":
        return bool(np.max(np.abs(fn.a)) == 0.0)
    return len(fn.poly) == 0
