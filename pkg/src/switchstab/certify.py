"""Numerical checks for every certificate condition used by the toolkit.

All region-restricted sign conditions are checked by deterministic sampling
(equi-angular circle points in 2D, a fixed pseudo-random sphere set in nD),
so a ``pass`` verdict always means "no violation found at the sampled
resolution" and each report says so.  Strict inequalities whose worst margin
sits inside the inconclusive band are reported ``inconclusive`` rather than
rounded to a verdict.  Every ``fail`` carries at least one witness that
re-evaluates to a genuine violation of the stated inequality.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import clf as clfmod
from .clf import Pwsclf, RateFunction, rate_value
from .config import DEFAULT, Tolerances
from .linalg import as_matrix, eig_symmetric, is_hurwitz, lyapunov_solve
from .model import SwitchedSystem, eval_field
from .switchlaw import (
    SlidingSurface,
    TangencyError,
    boundary_limit_modes,
    quadratic_fn,
    sliding_candidate_modes,
    sliding_coefficients,
)

__all__ = [
    "CertReport",
    "BmiCertificate",
    "ArgminDiagnostic",
    "check_psclf",
    "check_condition_12",
    "check_strict_completeness",
    "search_stable_convex_combination",
    "check_largest_region_conditions",
    "check_pointwise_max_conditions",
    "verify_bmi_certificate",
    "argmin_diagnostic",
    "certificate_from_dict",
    "certificate_to_dict",
]


@dataclass
class CertReport:
    condition: str
    verdict: str = "pass"  # 'pass' | 'fail' | 'inconclusive'
    witnesses: list[dict] = field(default_factory=list)
    samples_used: int = 0
    tolerances: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def merge_verdict(self, verdict: str) -> None:
        order = {"pass": 0, "inconclusive": 1, "fail": 2}
        if order[verdict] > order[self.verdict]:
            self.verdict = verdict

    def add_witness(self, point, magnitude: float, detail: str) -> None:
        pt = np.asarray(point, dtype=float).tolist() if not np.isscalar(point) else point
        self.witnesses.append({"point": pt, "magnitude": float(magnitude), "detail": detail})

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "samples_used": self.samples_used,
            "tolerances": self.tolerances,
            "details": self.details,
            "notes": self.notes,
        }


def _classify(violation: float, band: float, strict: bool) -> str:
    """Verdict from the worst violation of an inequality.

    ``violation > 0`` breaks the inequality; strict conditions additionally
    report ``inconclusive`` when the margin sits inside the band.
    """
    if violation > band:
        return "fail"
    if strict and violation > -band:
        return "inconclusive"
    return "pass"


# -- deterministic sample sets -------------------------------------------------

_SPHERE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def unit_sphere(n: int, count: int) -> np.ndarray:
    """Fixed sample set on the unit sphere (equi-angular with half-step offset
    in 2D so coordinate axes are straddled symmetrically, seeded in nD)."""
    key = (n, count)
    pts = _SPHERE_CACHE.get(key)
    if pts is None:
        if n == 1:
            pts = np.array([[1.0], [-1.0]])
        elif n == 2:
            ang = (np.arange(count) + 0.5) * (2.0 * np.pi / count)
            pts = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            rng = np.random.Generator(np.random.PCG64(777))
            g = rng.standard_normal((count, n))
            pts = g / np.linalg.norm(g, axis=1, keepdims=True)
        _SPHERE_CACHE[key] = pts
    return pts


def _grid_points(n: int, samples: int, halfwidth: float) -> np.ndarray:
    side = max(3, int(round(samples ** (1.0 / n))))
    if side % 2 == 0:
        side += 1  # odd side keeps the coordinate axes in the grid
    axis = np.linspace(-halfwidth, halfwidth, side)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.column_stack([m.reshape(-1) for m in mesh])


def _sym_form(a: np.ndarray, p: np.ndarray) -> np.ndarray:
    return a.T @ p + p @ a


def _min_directional(v: Pwsclf, sys: SwitchedSystem, x: np.ndarray) -> float:
    return min(
        clfmod.directional_derivative(v, x, eval_field(sys, i, x))
        for i in range(1, sys.modes + 1)
    )


# -- PSCLF conditions (positivity, radial unboundedness, decrease) -------------


def check_psclf(
    v: Pwsclf,
    w: RateFunction,
    sys: SwitchedSystem,
    samples: int = 720,
    grid_halfwidth: float = 2.0,
    radius: float = 1.0,
    tol: Tolerances = DEFAULT,
) -> CertReport:
    """Check the candidate pair (V, W): positivity of both, bounded sublevel
    sets, and the pointwise decrease min_i DV(x; f_i(x)) <= -W(x).

    For a linear system with quadratic pieces and a quadratic rate the check
    samples a single sphere (sufficient by degree-2 homogeneity); otherwise a
    grid over [-grid_halfwidth, grid_halfwidth]^n is used.
    """
    if v.dimension != sys.dimension:
        raise ValueError("system and CLF dimensions disagree")
    if samples < 100:
        raise ValueError("samples must be at least 100")
    homogeneous = (
        sys.is_linear
        and v.kind in clfmod.QUADRATIC_PIECE_KINDS
        and w.kind == "quadratic_norm"
    )
    if homogeneous:
        pts = radius * unit_sphere(sys.dimension, samples)
    else:
        pts = _grid_points(sys.dimension, samples, grid_halfwidth)
    nonzero = pts[np.einsum("ij,ij->i", pts, pts) > 0.0]

    report = CertReport(condition="psclf", samples_used=nonzero.shape[0])
    report.tolerances = {"inconclusive_rtol": tol.inconclusive_rtol}
    report.notes.append(
        "pass means no violation found at the sampled resolution"
        + ("; sampling restricted to a sphere by degree-2 homogeneity" if homogeneous else "")
    )

    # (4) positivity of V and W away from the origin
    v_vals = np.array([clfmod.value(v, x) for x in nonzero])
    w_vals = np.array([rate_value(w, x) for x in nonzero])
    for name, vals in (("V_positive", v_vals), ("W_positive", w_vals)):
        # median scaling keeps the band tied to exact zeros, not to the range
        band = tol.inconclusive_rtol * (1.0 + float(np.median(np.abs(vals))))
        worst_idx = int(np.argmin(vals))
        violation = -float(vals[worst_idx])
        verdict = _classify(violation, band, strict=True)
        report.details[name] = {"verdict": verdict, "worst_margin": float(vals[worst_idx])}
        if verdict == "fail":
            report.add_witness(nonzero[worst_idx], violation, f"{name} violated")
        if verdict == "inconclusive" and name == "W_positive":
            report.notes.append(
                "W is positive semidefinite at sampled points; the decreasing "
                "condition below is evaluated for the stated W regardless"
            )
        report.merge_verdict(verdict)

    # (5) bounded sublevel sets
    report.details["sublevel_bounded"] = _check_radial(v, samples, tol, report)

    # (6) decrease along the best mode
    dec = np.array([_min_directional(v, sys, x) + rate_value(w, x) for x in nonzero])
    band = tol.inconclusive_rtol * (1.0 + float(np.max(np.abs(dec))))
    worst_idx = int(np.argmax(dec))
    violation = float(dec[worst_idx])
    verdict = _classify(violation, band, strict=False)
    report.details["decreasing"] = {"verdict": verdict, "worst_margin": violation}
    if verdict == "fail":
        report.add_witness(
            nonzero[worst_idx], violation, "min_i DV(x; f_i(x)) + W(x) > 0"
        )
    report.merge_verdict(verdict)
    return report


def _check_radial(v: Pwsclf, samples: int, tol: Tolerances, report: CertReport) -> dict:
    n = v.dimension
    if v.kind == "smooth_quadratic":
        eigs, _ = eig_symmetric(v.pieces[0])
        band = tol.inconclusive_rtol * (1.0 + float(np.max(np.abs(eigs))))
        verdict = _classify(-float(eigs[-1]), band, strict=True)
        if verdict == "fail":
            report.add_witness([], -float(eigs[-1]), "P is not positive definite")
        report.merge_verdict(verdict)
        return {"verdict": verdict, "min_eigenvalue": float(eigs[-1])}
    if v.kind == "smooth_polynomial":
        dirs = unit_sphere(n, min(samples, 720))
        radii = [1.0, 2.0, 4.0, 8.0, 16.0]
        mins = [min(clfmod.value(v, r * u) for u in dirs) for r in radii]
        grows = all(b >= a for a, b in zip(mins, mins[1:]))
        positive = all(m > 0 for m in mins)
        verdict = "pass" if (grows and positive) else "fail"
        if verdict == "fail":
            report.add_witness([], min(mins), "sampled sphere minima of V do not grow")
        report.merge_verdict(verdict)
        return {"verdict": verdict, "sphere_minima": mins, "radii": radii}
    # quadratic pieces: positive definite on the closure of each region
    dirs = unit_sphere(n, min(samples, 2000 if n > 2 else 720))
    worst = np.inf
    worst_pt = None
    for u in dirs:
        for j in clfmod.active_pieces(v, u):
            val = float(u @ v.pieces[j - 1] @ u)
            if val < worst:
                worst, worst_pt = val, u
    band = tol.inconclusive_rtol * (1.0 + abs(worst))
    verdict = _classify(-worst, band, strict=True)
    if verdict == "fail":
        report.add_witness(worst_pt, -worst, "piece value not positive on its region")
    report.merge_verdict(verdict)
    return {"verdict": verdict, "worst_piece_value": worst}


# -- boundary sampling ---------------------------------------------------------


def _region_form(v: Pwsclf, j: int) -> np.ndarray:
    if v.kind == "piecewise_quadratic":
        return v.regions[j - 1]
    if v.kind == "pointwise_min":
        return -v.pieces[j - 1]
    return v.pieces[j - 1]


def _quadric_line_directions(b: np.ndarray) -> list[np.ndarray]:
    """Unit directions spanning {x in R^2 : x'Bx = 0} for symmetric 2x2 B."""
    w, q = np.linalg.eigh(b)
    a, c = float(w[0]), float(w[1])  # a <= c
    va, vc = q[:, 0], q[:, 1]
    out = []
    if a > 0 or c < 0:
        return out  # definite: only the origin
    if a == 0.0 and c == 0.0:
        return out  # B = 0: no boundary form
    if a < 0 < c:
        r = np.sqrt(-a / c)
        for s in (1.0, -1.0):
            d = va + s * r * vc
            out.append(d / np.linalg.norm(d))
    elif a == 0.0:
        out.append(va)
    else:  # c == 0.0
        out.append(vc)
    return out


def _pair_boundary_points(
    v: Pwsclf, j: int, k: int, count: int
) -> list[np.ndarray]:
    """Points on the (j,k) piece boundary where both pieces are active."""
    b = _region_form(v, j) - _region_form(v, k)
    if np.max(np.abs(b)) == 0.0:
        return []
    n = v.dimension
    pts: list[np.ndarray] = []
    if n == 2:
        dirs = _quadric_line_directions(b)
        if not dirs:
            return []
        radii = np.linspace(0.25, 2.0, max(1, count // (2 * len(dirs))))
        for d in dirs:
            for r in radii:
                for s in (1.0, -1.0):
                    pts.append(s * r * d)
    else:
        for u in unit_sphere(n, max(4 * count, 512)):
            x = u.copy()
            ok = False
            for _ in range(30):
                g = float(x @ b @ x)
                grad = 2.0 * (b @ x)
                gn = float(grad @ grad)
                if gn == 0.0:
                    break
                x = x - (g / gn) * grad
                if abs(x @ b @ x) <= 1e-12 * (1.0 + float(x @ x)):
                    ok = True
                    break
            if ok and float(x @ x) > 1e-8:
                pts.append(x)
            if len(pts) >= count:
                break
    return [x for x in pts if {j, k} <= clfmod.active_pieces(v, x)]


def check_condition_12(
    v: Pwsclf,
    w: RateFunction,
    law,
    boundary_samples: int = 100,
    tol: Tolerances = DEFAULT,
) -> CertReport:
    """Boundary stability condition: where the nonsmooth surface of V meets
    the switching boundary, some active piece j must satisfy
    DV_j(x; f_q(x)) <= -W(x) for every actively sliding mode q outside M_j(x).
    """
    report = CertReport(condition="cond12")
    report.tolerances = {"inconclusive_rtol": tol.inconclusive_rtol}
    sys = law.system
    q_all = set(range(1, sys.modes + 1))
    if v.kind in clfmod.SMOOTH_KINDS or v.m < 2:
        report.notes.append("vacuous: V has no nonsmooth boundary")
        return report
    examined = 0
    vacuous = 0
    fallback_used = False
    for j in range(1, v.m + 1):
        for k in range(j + 1, v.m + 1):
            for x in _pair_boundary_points(v, j, k, boundary_samples):
                ism = sliding_candidate_modes(law, x)
                if len(ism) < 2:
                    vacuous += 1
                    continue
                examined += 1
                active = None
                if len(ism) == 2:
                    b = _region_form(v, j) - _region_form(v, k)
                    surface = SlidingSurface(fn=quadratic_fn(b))
                    try:
                        res = sliding_coefficients(surface, sys, x, law=law, tol=tol)
                        if res.crossing:
                            vacuous += 1
                            continue
                        active = set()
                        p, q = res.modes
                        if res.alpha > tol.active_weight_atol:
                            active.add(p)
                        if 1.0 - res.alpha > tol.active_weight_atol:
                            active.add(q)
                    except (TangencyError, ValueError):
                        active = None
                if active is None:
                    active = set(ism)
                    fallback_used = True
                ok = False
                worst = np.inf
                wx = rate_value(w, x)
                for jj in sorted(clfmod.active_pieces(v, x)):
                    mj = boundary_limit_modes(law, jj, x)
                    check_set = (q_all - mj) & active
                    if not check_set:
                        ok = True
                        break
                    margins = [
                        clfmod.piece_directional_derivative(v, jj, x, eval_field(sys, qq, x))
                        + wx
                        for qq in check_set
                    ]
                    m = max(margins)
                    worst = min(worst, m)
                    band = tol.inconclusive_rtol * (1.0 + abs(m))
                    if m <= band:
                        ok = True
                        break
                if not ok:
                    report.add_witness(
                        x, worst, f"no active piece satisfies condition (12) at pieces ({j},{k})"
                    )
                    report.merge_verdict("fail")
    report.samples_used = examined + vacuous
    report.details = {"examined": examined, "vacuous": vacuous}
    if fallback_used:
        report.notes.append(
            "active sliding mode set approximated by I_sm where coefficients "
            "were unavailable (conservative fallback)"
        )
    if examined == 0:
        report.notes.append("vacuous: no point of the nonsmooth boundary lies on "
                            "a switching boundary at the sampled resolution")
    return report


# -- quadratic stabilization ----------------------------------------------------


def check_strict_completeness(
    p, sys: SwitchedSystem, sphere_samples: int = 720, tol: Tolerances = DEFAULT
) -> CertReport:
    """P > 0 and min_i x'(A_i'P + P A_i)x < 0 on the sampled unit sphere."""
    if not sys.is_linear:
        raise ValueError("strict completeness is defined for linear systems")
    p = as_matrix(p, square=True)
    report = CertReport(condition="completeness", samples_used=sphere_samples)
    report.tolerances = {"inconclusive_rtol": tol.inconclusive_rtol}
    eigs, _ = eig_symmetric(p)
    band = tol.inconclusive_rtol * (1.0 + float(np.max(np.abs(eigs))))
    verdict = _classify(-float(eigs[-1]), band, strict=True)
    report.details["P_positive_definite"] = {
        "verdict": verdict, "min_eigenvalue": float(eigs[-1]),
    }
    if verdict == "fail":
        report.add_witness([], -float(eigs[-1]), "P is not positive definite")
    report.merge_verdict(verdict)

    forms = [_sym_form(f.matrix, p) for f in sys.subsystems]
    pts = unit_sphere(sys.dimension, sphere_samples)
    vals = np.array([min(float(u @ m @ u) for m in forms) for u in pts])
    band = tol.inconclusive_rtol * (1.0 + float(np.max(np.abs(vals))))
    worst_idx = int(np.argmax(vals))
    verdict = _classify(float(vals[worst_idx]), band, strict=True)
    report.details["min_derivative_negative"] = {
        "verdict": verdict, "worst_margin": float(vals[worst_idx]),
    }
    if verdict == "fail":
        report.add_witness(pts[worst_idx], float(vals[worst_idx]),
                           "min_i x'(A_i'P + PA_i)x >= 0")
    report.merge_verdict(verdict)
    return report


def _simplex_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _simplex_compositions(total - head, parts - 1):
            yield (head,) + rest


def search_stable_convex_combination(
    sys: SwitchedSystem, grid: int = 100
) -> tuple[np.ndarray, np.ndarray] | None:
    """Grid the weight simplex and return (alpha, P) for the first Hurwitz
    combination, or None.

    Grid points are tried in order of distance from the simplex centroid, so
    the most balanced stabilizing combination is found first.
    """
    if not sys.is_linear:
        raise ValueError("stable convex combinations are defined for linear systems")
    m = sys.modes
    if m > 4:
        raise ValueError("simplex gridding supports at most 4 modes")
    if grid < 1:
        raise ValueError("grid must be >= 1")
    mats = [f.matrix for f in sys.subsystems]
    centroid = 1.0 / m
    combos = sorted(
        _simplex_compositions(grid, m),
        key=lambda ks: (sum((k / grid - centroid) ** 2 for k in ks), ks),
    )
    eye = np.eye(sys.dimension)
    for ks in combos:
        alpha = np.array(ks, dtype=float) / grid
        a = sum(al * mat for al, mat in zip(alpha, mats))
        if is_hurwitz(a):
            return alpha, lyapunov_solve(a, eye)
    return None


# -- piecewise quadratic / pointwise max condition sets --------------------------


def _region_condition_report(
    name: str,
    v: Pwsclf,
    sys: SwitchedSystem,
    sphere_samples: int,
    check_continuity: bool,
    tol: Tolerances,
) -> CertReport:
    if not sys.is_linear:
        raise ValueError(f"{name} conditions are defined for linear systems")
    m = v.m
    labels = {True: ("Q1", "Q2", "Q3", "Q4"), False: ("M1", "M2", None, "M3")}[check_continuity]
    report = CertReport(condition=name, samples_used=sphere_samples)
    report.tolerances = {"inconclusive_rtol": tol.inconclusive_rtol}
    report.notes.append("pass means no violation found at the sampled resolution")
    pts = unit_sphere(v.dimension, sphere_samples)
    closure: dict[int, list[np.ndarray]] = {j: [] for j in range(1, m + 1)}
    interior: dict[int, list[np.ndarray]] = {j: [] for j in range(1, m + 1)}
    for u in pts:
        act = clfmod.active_pieces(v, u)
        for j in act:
            closure[j].append(u)
        if len(act) == 1:
            interior[next(iter(act))].append(u)

    forms = {
        (i, j): _sym_form(sys.subsystems[i - 1].matrix, v.pieces[j - 1])
        for i in range(1, sys.modes + 1)
        for j in range(1, m + 1)
    }

    # positivity of each piece on its region closure
    worst = np.inf
    worst_pt = None
    for j in range(1, m + 1):
        if not closure[j]:
            report.notes.append(f"region {j} is empty at the sampled resolution; "
                                "its conditions are vacuous")
            continue
        for u in closure[j]:
            val = float(u @ v.pieces[j - 1] @ u)
            if val < worst:
                worst, worst_pt = val, u
    band = tol.inconclusive_rtol * (1.0 + abs(worst if np.isfinite(worst) else 0.0))
    verdict = _classify(-worst, band, strict=True) if np.isfinite(worst) else "pass"
    report.details[labels[0]] = {"verdict": verdict, "worst_piece_value": worst}
    if verdict == "fail":
        report.add_witness(worst_pt, -worst, f"{labels[0]}: piece value not positive")
    report.merge_verdict(verdict)

    # per-region decrease of the matching piece
    worst = -np.inf
    worst_pt = None
    for j in range(1, m + 1):
        for u in interior[j]:
            val = min(float(u @ forms[(i, j)] @ u) for i in range(1, sys.modes + 1))
            if val > worst:
                worst, worst_pt = val, u
    band = tol.inconclusive_rtol * (1.0 + abs(worst if np.isfinite(worst) else 0.0))
    verdict = _classify(worst, band, strict=True) if np.isfinite(worst) else "pass"
    report.details[labels[1]] = {"verdict": verdict, "worst_margin": worst}
    if verdict == "fail":
        report.add_witness(worst_pt, worst, f"{labels[1]}: min-mode derivative not negative")
    report.merge_verdict(verdict)

    boundary: dict[int, list[np.ndarray]] = {j: [] for j in range(1, m + 1)}
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            pb = _pair_boundary_points(v, j, k, max(32, sphere_samples // 8))
            boundary[j].extend(pb)
            boundary[k].extend(pb)
            if check_continuity and pb:
                hj = _region_form(v, j) - _region_form(v, k)
                pn = np.linalg.norm(v.pieces[j - 1] - v.pieces[k - 1])
                hn = np.linalg.norm(hj)
                ratio = max(1.0, pn / hn) if hn > 0 else 1.0
                worst = 0.0
                worst_pt = None
                for x in pb:
                    gap = abs(float(x @ (v.pieces[j - 1] - v.pieces[k - 1]) @ x))
                    cap = 1e-9 * (1.0 + float(x @ x)) * ratio
                    if gap - cap > worst:
                        worst, worst_pt = gap - cap, x
                verdict = "pass" if worst <= 0.0 else "fail"
                prev = report.details.get(labels[2], {"verdict": "pass", "worst_gap": 0.0})
                prev["verdict"] = "fail" if verdict == "fail" else prev["verdict"]
                prev["worst_gap"] = max(prev["worst_gap"], worst)
                report.details[labels[2]] = prev
                if verdict == "fail":
                    report.add_witness(worst_pt, worst,
                                       f"{labels[2]}: pieces {j},{k} differ on their boundary")
                report.merge_verdict(verdict)
    if check_continuity and labels[2] not in report.details:
        report.details[labels[2]] = {"verdict": "pass", "worst_gap": 0.0}

    # boundary condition: for each piece boundary some k-th piece decreases
    # along every mode
    sub = {"verdict": "pass", "chosen_k": {}}
    for j in range(1, m + 1):
        if not boundary[j]:
            sub["chosen_k"][str(j)] = None
            continue
        best_k = None
        best_worst = np.inf
        for k in range(1, m + 1):
            worst = -np.inf
            worst_pt = None
            worst_i = None
            for x in boundary[j]:
                for i in range(1, sys.modes + 1):
                    val = float(x @ forms[(i, k)] @ x)
                    if val > worst:
                        worst, worst_pt, worst_i = val, x, i
            if worst < best_worst:
                best_worst, best_k = worst, k
                best_pt, best_i = worst_pt, worst_i
        band = tol.inconclusive_rtol * (1.0 + abs(best_worst))
        verdict = _classify(best_worst, band, strict=True)
        if verdict == "pass":
            sub["chosen_k"][str(j)] = best_k
        else:
            sub["chosen_k"][str(j)] = None
            sub["verdict"] = verdict if sub["verdict"] != "fail" else "fail"
            if verdict == "fail":
                report.add_witness(
                    best_pt, best_worst,
                    f"{labels[3]}: no piece decreases along mode {best_i} on the "
                    f"boundary of region {j}",
                )
            report.merge_verdict(verdict)
    report.details[labels[3]] = sub
    return report


def check_largest_region_conditions(
    v: Pwsclf, w: RateFunction, sys: SwitchedSystem,
    sphere_samples: int = 720, tol: Tolerances = DEFAULT,
) -> CertReport:
    """Sampled conditions Q1-Q4 for a piecewise quadratic candidate on the
    region partition induced by the H forms."""
    if v.kind != "piecewise_quadratic":
        raise ValueError("Q conditions apply to piecewise_quadratic candidates")
    return _region_condition_report("largest_region", v, sys, sphere_samples, True, tol)


def check_pointwise_max_conditions(
    v: Pwsclf, w: RateFunction, sys: SwitchedSystem,
    sphere_samples: int = 720, tol: Tolerances = DEFAULT,
) -> CertReport:
    """Sampled conditions M1-M3 for a pointwise-maximum candidate."""
    if v.kind != "pointwise_max":
        raise ValueError("M conditions apply to pointwise_max candidates")
    return _region_condition_report("pointwise_max", v, sys, sphere_samples, False, tol)


# -- matrix-inequality certificates ---------------------------------------------


@dataclass
class BmiCertificate:
    """All matrices and multipliers of one matrix-inequality certificate."""

    P: tuple[np.ndarray, ...]
    H: tuple[np.ndarray, ...]         # empty for the pointwise-max form
    eta1: float
    eta2: float
    xi: np.ndarray                    # (m, m)
    gamma: np.ndarray                 # (m, m), >= 0
    beta: np.ndarray                  # (m, m), >= 0
    zeta: np.ndarray                  # (M, m, m), >= 0
    lam: np.ndarray                   # (M, m, m, m)
    alpha: np.ndarray                 # (M, m), columns on the simplex

    @property
    def m(self) -> int:
        return len(self.P)


def certificate_from_dict(doc: dict) -> BmiCertificate:
    p = tuple(as_matrix(a, square=True) for a in doc["P"])
    h = tuple(as_matrix(a, square=True) for a in doc.get("H", []))
    return BmiCertificate(
        P=p,
        H=h,
        eta1=float(doc["eta1"]),
        eta2=float(doc["eta2"]),
        xi=np.asarray(doc.get("xi", np.zeros((len(p), len(p)))), dtype=float),
        gamma=np.asarray(doc["gamma"], dtype=float),
        beta=np.asarray(doc["beta"], dtype=float),
        zeta=np.asarray(doc["zeta"], dtype=float),
        lam=np.asarray(doc["lambda"], dtype=float),
        alpha=np.asarray(doc["alpha"], dtype=float),
    )


def certificate_to_dict(cert: BmiCertificate) -> dict:
    return {
        "P": [p.tolist() for p in cert.P],
        "H": [h.tolist() for h in cert.H],
        "eta1": cert.eta1,
        "eta2": cert.eta2,
        "xi": cert.xi.tolist(),
        "gamma": cert.gamma.tolist(),
        "beta": cert.beta.tolist(),
        "zeta": cert.zeta.tolist(),
        "lambda": cert.lam.tolist(),
        "alpha": cert.alpha.tolist(),
    }


def _validate_certificate(cert: BmiCertificate, sys: SwitchedSystem, which: str) -> None:
    m, big_m, n = cert.m, sys.modes, sys.dimension
    if which not in ("theorem3", "theorem4"):
        raise ValueError(f"unknown certificate family {which!r}")
    if which == "theorem3" and len(cert.H) != m:
        raise ValueError("the region-based form needs one H per piece")
    if which == "theorem4" and len(cert.H) != 0:
        raise ValueError("the pointwise-max form carries no H matrices")
    for mat in cert.P + cert.H:
        if mat.shape != (n, n):
            raise ValueError("certificate matrices must match the system dimension")
    if cert.eta1 <= 0 or cert.eta2 <= 0:
        raise ValueError("eta1 and eta2 must be positive")
    shapes = {
        "xi": (cert.xi, (m, m)),
        "gamma": (cert.gamma, (m, m)),
        "beta": (cert.beta, (m, m)),
        "zeta": (cert.zeta, (big_m, m, m)),
        "lambda": (cert.lam, (big_m, m, m, m)),
        "alpha": (cert.alpha, (big_m, m)),
    }
    for name, (arr, shape) in shapes.items():
        if arr.shape != shape:
            raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
    for name in ("gamma", "beta", "zeta"):
        if np.any(shapes[name][0] < 0):
            raise ValueError(f"{name} multipliers must be nonnegative")
    if np.any(cert.alpha < -1e-12) or np.any(cert.alpha > 1 + 1e-12):
        raise ValueError("alpha entries must lie in [0, 1]")
    if np.max(np.abs(cert.alpha.sum(axis=0) - 1.0)) > 1e-9:
        raise ValueError("alpha columns must sum to one")


def verify_bmi_certificate(
    cert: BmiCertificate, sys: SwitchedSystem, which: str,
    tol: Tolerances = DEFAULT,
) -> CertReport:
    """Assemble each certificate inequality exactly as stated and test it by
    symmetric eigenvalues: semidefinite within +-margin, strict beyond it."""
    if not sys.is_linear:
        raise ValueError("matrix-inequality certificates apply to linear systems")
    _validate_certificate(cert, sys, which)
    m = cert.m
    mats = [f.matrix for f in sys.subsystems]
    h_eff = cert.H if which == "theorem3" else cert.P
    label = {"theorem3": ("14a", "14b", "14c", "14d"),
             "theorem4": ("16a", "16b", None, "16c")}[which]
    report = CertReport(condition=which)
    report.tolerances = {"definite_margin_rtol": tol.definite_margin_rtol}
    checks: list[tuple[str, np.ndarray, str]] = []
    for j in range(m):
        acc = cert.P[j] - cert.eta1 * np.eye(sys.dimension)
        for k in range(m):
            acc = acc - cert.gamma[j, k] * (h_eff[j] - h_eff[k])
        checks.append((f"{label[0]}[j={j+1}]", acc, ">="))
    for j in range(m):
        ac = sum(cert.alpha[i, j] * mats[i] for i in range(sys.modes))
        acc = _sym_form(ac, cert.P[j]) + cert.eta2 * cert.P[j]
        for k in range(m):
            acc = acc - cert.beta[j, k] * (h_eff[k] - h_eff[j])
        checks.append((f"{label[1]}[j={j+1}]", acc, "<="))
    if which == "theorem3":
        for j in range(m):
            for k in range(m):
                if j == k:
                    continue
                acc = cert.P[j] - cert.P[k] - cert.xi[j, k] * (h_eff[j] - h_eff[k])
                checks.append((f"{label[2]}[j={j+1},k={k+1}]", acc, "=="))
    for i in range(sys.modes):
        for j in range(m):
            acc = np.zeros((sys.dimension, sys.dimension))
            for k in range(m):
                acc = acc + cert.zeta[i, j, k] * _sym_form(mats[i], cert.P[k])
            for k in range(m):
                for t in range(m):
                    acc = acc + cert.lam[i, j, k, t] * (h_eff[j] - h_eff[t])
            checks.append((f"{label[3]}[i={i+1},j={j+1}]", acc, "<"))

    report.samples_used = len(checks)
    for name, mat, sense in checks:
        mat = 0.5 * (mat + mat.T)
        eigs, vecs = eig_symmetric(mat)
        scale = 1.0 + float(np.linalg.norm(mat))
        margin = tol.definite_margin_rtol * scale
        lo, hi = float(eigs[-1]), float(eigs[0])
        if sense == ">=":
            verdict = "pass" if lo >= -margin else "fail"
            offending, ev = lo, vecs[:, -1]
        elif sense == "<=":
            verdict = "pass" if hi <= margin else "fail"
            offending, ev = hi, vecs[:, 0]
        elif sense == "<":
            verdict = "pass" if hi < -margin else ("inconclusive" if hi <= margin else "fail")
            offending, ev = hi, vecs[:, 0]
        else:  # '=='
            bad = lo if abs(lo) > abs(hi) else hi
            verdict = "pass" if abs(bad) <= margin else "fail"
            offending, ev = bad, (vecs[:, -1] if abs(lo) > abs(hi) else vecs[:, 0])
        report.details[name] = {"verdict": verdict, "margin": offending, "sense": sense}
        if verdict == "fail":
            report.add_witness(ev, abs(offending), f"{name}: eigenvalue {offending:+.6e} "
                                                   f"breaks sense {sense}")
        report.merge_verdict(verdict)
    return report


# -- the nu versus nu-hat diagnostic ---------------------------------------------


@dataclass
class ArgminDiagnostic:
    pieces: tuple[int, ...]
    table: np.ndarray                  # |J(x)| x M of DV_j(x; f_i(x))
    table_min: float
    table_min_pairs: tuple[tuple[int, int], ...]
    table_min_modes: frozenset[int]
    onesided: np.ndarray               # DV(x; f_i(x)) per mode
    onesided_min: float
    onesided_modes: frozenset[int]


def argmin_diagnostic(
    v: Pwsclf, sys: SwitchedSystem, x, tie_tol: float = 1e-9
) -> ArgminDiagnostic:
    """The per-piece derivative table at x together with the minimizer set of
    the induced law and of the set-valued one-sided-derivative law.

    On nonsmooth boundaries the two minimizer sets generally differ; the
    table minimum is what the induced law uses, the one-sided values are the
    true directional-derivative limits.
    """
    x = np.asarray(x, dtype=float)
    pieces = tuple(sorted(clfmod.active_pieces(v, x)))
    fields = [eval_field(sys, i, x) for i in range(1, sys.modes + 1)]
    table = np.array([
        [clfmod.piece_directional_derivative(v, j, x, f) for f in fields]
        for j in pieces
    ])
    tmin = float(table.min())
    gap = tie_tol * (1.0 + abs(tmin))
    pairs = tuple(
        (pieces[a], b + 1)
        for a in range(table.shape[0])
        for b in range(table.shape[1])
        if table[a, b] <= tmin + gap
    )
    onesided = np.array([clfmod.directional_derivative(v, x, f) for f in fields])
    omin = float(onesided.min())
    ogap = tie_tol * (1.0 + abs(omin))
    omodes = frozenset(i + 1 for i in range(sys.modes) if onesided[i] <= omin + ogap)
    return ArgminDiagnostic(
        pieces=pieces,
        table=table,
        table_min=tmin,
        table_min_pairs=pairs,
        table_min_modes=frozenset(i for _, i in pairs),
        onesided=onesided,
        onesided_min=omin,
        onesided_modes=omodes,
    )
