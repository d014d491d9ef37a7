"""Closed-loop simulation of discontinuous switching laws.

Two complementary integrators:

* ``simulate_relay``    fixed-step RK4 with the active mode held between
  switches; a hysteresis band delays switching so chattering approximates
  sliding, the way physical relays do.
* ``simulate_filippov`` event-driven RK4: surface crossings are located by
  bisection, and on attractive surfaces the tangential Filippov combination
  is integrated explicitly with the sliding coefficient re-solved each step.

Both are deterministic: identical inputs give bit-identical trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clf import Pwsclf, value as clf_value
from .linalg import as_vector
from .switchlaw import (
    SlidingSurface,
    TangencyError,
    _solve_alpha,
    equivalent_control,
    surface_side_modes,
)

__all__ = [
    "SimConfig",
    "Trajectory",
    "NumericOverflowError",
    "simulate_relay",
    "simulate_filippov",
    "lyapunov_trace",
    "fit_exponential_rate",
]

SLIDING_MODE = 0  # mode marker for sliding samples


class NumericOverflowError(RuntimeError):
    """State left the floating range; carries the trajectory up to the last
    valid sample in ``.trajectory``."""

    def __init__(self, message: str, trajectory: "Trajectory"):
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class SimConfig:
    step: float
    t_final: float
    hysteresis: float = 0.0
    mode: str = "relay"  # 'relay' | 'filippov'
    event_tolerance: float = 1e-9
    divergence_bound: float = 1e6
    relay_rule: str = "distance"  # 'distance' | 'margin'

    def __post_init__(self):
        if self.step <= 0 or self.t_final <= 0:
            raise ValueError("step and t_final must be positive")
        if self.step > self.t_final:
            raise ValueError("step must not exceed t_final")
        if self.hysteresis < 0:
            raise ValueError("hysteresis must be nonnegative")
        if self.mode not in ("relay", "filippov"):
            raise ValueError(f"unknown simulation mode {self.mode!r}")
        if not 0 < self.event_tolerance < self.step:
            raise ValueError("event_tolerance must lie in (0, step)")
        if self.divergence_bound <= 0:
            raise ValueError("divergence_bound must be positive")
        if self.relay_rule not in ("distance", "margin"):
            raise ValueError(f"unknown relay rule {self.relay_rule!r}")


@dataclass
class Trajectory:
    dimension: int
    times: list[float] = field(default_factory=list)
    states: list[np.ndarray] = field(default_factory=list)
    modes: list[int] = field(default_factory=list)       # 0 marks sliding samples
    sliding: list[bool] = field(default_factory=list)
    alphas: list[float | None] = field(default_factory=list)
    v_values: list[float | None] = field(default_factory=list)
    diverged: bool = False
    tangency_fallback: bool = False

    def append(self, t, x, mode, sliding=False, alpha=None, v=None):
        if self.times and t <= self.times[-1]:
            return
        self.times.append(float(t))
        self.states.append(np.array(x, dtype=float))
        self.modes.append(int(mode))
        self.sliding.append(bool(sliding))
        self.alphas.append(alpha)
        self.v_values.append(v)

    @property
    def state_array(self) -> np.ndarray:
        return np.array(self.states)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def sliding_fraction(self) -> float:
        if not self.sliding:
            return 0.0
        return sum(self.sliding) / len(self.sliding)

    def to_csv(self, path) -> None:
        """t,x1..xn,mode,sliding,alpha,V with 12 significant digits."""
        cols = ["t"] + [f"x{k+1}" for k in range(self.dimension)] + [
            "mode", "sliding", "alpha", "V",
        ]
        with open(path, "w", newline="") as fh:
            fh.write(",".join(cols) + "\n")
            for t, x, m, s, a, v in zip(
                self.times, self.states, self.modes, self.sliding, self.alphas, self.v_values
            ):
                row = [f"{t:.11e}"] + [f"{xi:.11e}" for xi in x]
                row.append(str(m))
                row.append("1" if s else "0")
                row.append("" if a is None else f"{a:.11e}")
                row.append("" if v is None else f"{v:.11e}")
                fh.write(",".join(row) + "\n")


def _rk4(f, x: np.ndarray, h: float) -> np.ndarray:
    k1 = f(x)
    k2 = f(x + 0.5 * h * k1)
    k3 = f(x + 0.5 * h * k2)
    k4 = f(x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _v_of(clf: Pwsclf | None, x: np.ndarray) -> float | None:
    if clf is None:
        return None
    return clf_value(clf, x)


def _law_clf(law) -> Pwsclf | None:
    return getattr(law, "clf", None)


def _check_state(traj: Trajectory, x: np.ndarray) -> None:
    if not np.isfinite(x).all():
        raise NumericOverflowError("state is no longer finite", traj)


# -- relay --------------------------------------------------------------------


def simulate_relay(law, x0, cfg: SimConfig) -> Trajectory:
    """Hysteresis relay: hold the active mode until the switch rule fires.

    ``distance`` (default) switches once the state is a band ``hysteresis``
    past the decision boundary, measured first order as margin / ||grad
    margin||; this reproduces fixed-width hysteresis bands around switching
    surfaces.  ``margin`` switches on the raw decision-functional gap
    score_held - score_best > hysteresis * (1 + ||x||^2).
    """
    if cfg.mode != "relay":
        raise ValueError("cfg.mode must be 'relay'")
    x = as_vector(x0, law.dimension)
    clf = _law_clf(law)
    traj = Trajectory(dimension=law.dimension)
    sigma = law.mode(x)
    best = sigma
    t = 0.0
    nsteps = int(round(cfg.t_final / cfg.step))
    fields = law.system.subsystems
    for _ in range(nsteps):
        traj.append(t, x, sigma, sliding=(best != sigma), v=_v_of(clf, x))
        x = _rk4(fields[sigma - 1], x, cfg.step)
        t += cfg.step
        _check_state(traj, x)
        if x @ x > cfg.divergence_bound**2:
            traj.append(t, x, sigma, v=_v_of(clf, x))
            traj.diverged = True
            return traj
        best = law.mode(x)
        if best != sigma:
            m, g = law.switch_margin(x, sigma, best)
            if cfg.relay_rule == "distance":
                gn = float(np.sqrt(g @ g))
                if m > cfg.hysteresis * max(gn, 1e-15):
                    sigma = best
            else:
                if m > cfg.hysteresis * (1.0 + float(x @ x)):
                    sigma = best
    traj.append(t, x, sigma, sliding=(best != sigma), v=_v_of(clf, x))
    return traj


# -- event-driven Filippov ----------------------------------------------------


def _surface_tol(cfg: SimConfig, x: np.ndarray) -> float:
    return cfg.event_tolerance * (1.0 + float(x @ x))


def _locate_crossing(f, x0: np.ndarray, h: float, surface: SlidingSurface,
                     cfg: SimConfig) -> tuple[float, np.ndarray]:
    """Bisect the step [0, h] until |s| <= tol at the crossing point."""
    lo, hi = 0.0, h
    s_lo = surface.fn.value(x0)
    x_hi = _rk4(f, x0, h)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        x_mid = _rk4(f, x0, mid)
        s_mid = surface.fn.value(x_mid)
        if abs(s_mid) <= _surface_tol(cfg, x_mid):
            return mid, x_mid
        if s_lo * s_mid < 0.0:
            hi, x_hi = mid, x_mid
        else:
            lo, s_lo = mid, s_mid
    return hi, x_hi


def _consistent_mode(surface: SlidingSurface, law, x: np.ndarray,
                     p: int, q: int) -> int:
    """After a crossing, the mode whose field flows into its own side."""
    n = surface.fn.gradient(x)
    fp = law.system.subsystems[p - 1](x)
    fq = law.system.subsystems[q - 1](x)
    p_ok = float(n @ fp) < 0.0   # flows into s < 0, the p side
    q_ok = float(n @ fq) > 0.0
    if p_ok and q_ok:
        m = law.mode(x)
        return m if m in (p, q) else min(p, q)
    if p_ok:
        return p
    if q_ok:
        return q
    return min(p, q)


def simulate_filippov(law, surfaces, x0, cfg: SimConfig) -> Trajectory:
    """Event-driven integration with explicit sliding segments.

    Between events the held mode is integrated with RK4.  A sign change of
    any surface function is bisected down to ``event_tolerance``; on an
    attractive crossing with an interior coefficient the sliding field
    alpha f_p + (1-alpha) f_q is integrated, re-solving alpha each step and
    projecting back onto the surface with one Newton step per step.  Sliding
    exits when the coefficient leaves [0, 1], continuing with the field that
    is consistent with its own side.  A tangency on entry falls back to
    relay stepping for that segment (flagged on the trajectory).
    """
    if cfg.mode != "filippov":
        raise ValueError("cfg.mode must be 'filippov'")
    surfaces = list(surfaces)
    x = as_vector(x0, law.dimension)
    clf = _law_clf(law)
    traj = Trajectory(dimension=law.dimension)
    sigma = law.mode(x)
    t = 0.0
    sliding_on: SlidingSurface | None = None
    sliding_pq: tuple[int, int] = (0, 0)
    fields = law.system.subsystems

    def record(sl=False, al=None):
        traj.append(t, x, SLIDING_MODE if sl else sigma, sliding=sl, alpha=al,
                    v=_v_of(clf, x))

    # an initial point already on a surface gets the crossing treatment
    for surf in surfaces:
        if abs(surf.fn.value(x)) <= _surface_tol(cfg, x):
            entered, sigma = _enter_or_cross(surf, law, x, sigma, cfg, traj)
            if entered:
                sliding_on, sliding_pq = surf, entered
            break

    record(sl=sliding_on is not None,
           al=None if sliding_on is None else _alpha_now(sliding_on, law, sliding_pq, x))

    while t < cfg.t_final - 1e-12 * cfg.t_final:
        h = min(cfg.step, cfg.t_final - t)
        if sliding_on is None:
            fmode = fields[sigma - 1]
            x_new = _rk4(fmode, x, h)
            _check_state(traj, x_new)
            hit = None
            for surf in surfaces:
                s0, s1 = surf.fn.value(x), surf.fn.value(x_new)
                if s0 * s1 < 0.0 and abs(s0) > _surface_tol(cfg, x):
                    tau, x_e = _locate_crossing(fmode, x, h, surf, cfg)
                    if hit is None or tau < hit[0]:
                        hit = (tau, x_e, surf)
            if hit is None:
                x, t = x_new, t + h
            else:
                tau, x_e, surf = hit
                x, t = x_e, t + tau
                entered, sigma = _enter_or_cross(surf, law, x, sigma, cfg, traj)
                if entered:
                    sliding_on, sliding_pq = surf, entered
        else:
            p, q = sliding_pq
            try:
                alpha, _ = equivalent_control(sliding_on, law.system, p, q, x)
            except TangencyError:
                traj.tangency_fallback = True
                sliding_on = None
                sigma = law.mode(x)
                continue
            res_n = sliding_on.fn.gradient(x)
            fp = fields[p - 1](x)
            fq = fields[q - 1](x)
            attractive = float(res_n @ fp) > 0.0 and float(res_n @ fq) < 0.0
            if not (0.0 < alpha < 1.0) or not attractive:
                sigma = _consistent_mode(sliding_on, law, x, p, q)
                sliding_on = None
                continue

            def g(y, surf=sliding_on, p=p, q=q):
                _, vel = equivalent_control(surf, law.system, p, q, y)
                return vel

            x_new = _rk4(g, x, h)
            n_new = sliding_on.fn.gradient(x_new)
            nn = float(n_new @ n_new)
            if nn > 0.0:
                x_new = x_new - (sliding_on.fn.value(x_new) / nn) * n_new
            _check_state(traj, x_new)
            crossed = None
            for surf in surfaces:
                if surf is sliding_on:
                    continue
                s0, s1 = surf.fn.value(x), surf.fn.value(x_new)
                if s0 * s1 < 0.0 and abs(s0) > _surface_tol(cfg, x):
                    crossed = surf
                    break
            x, t = x_new, t + h
            if crossed is not None:
                entered, sigma = _enter_or_cross(crossed, law, x, sigma, cfg, traj)
                sliding_on = None if not entered else crossed
                if entered:
                    sliding_pq = entered
        if x @ x > cfg.divergence_bound**2:
            record(sl=sliding_on is not None)
            traj.diverged = True
            return traj
        record(sl=sliding_on is not None,
               al=None if sliding_on is None else _alpha_now(sliding_on, law, sliding_pq, x))
    return traj


def _alpha_now(surface: SlidingSurface, law, pq: tuple[int, int], x: np.ndarray):
    try:
        alpha, _ = equivalent_control(surface, law.system, pq[0], pq[1], x)
    except TangencyError:
        return None
    return min(1.0, max(0.0, alpha))


def _enter_or_cross(surface: SlidingSurface, law, x: np.ndarray, sigma: int,
                    cfg: SimConfig, traj: Trajectory):
    """Decide trajectory continuation at a located surface point.

    Returns ``(entered, sigma)`` where ``entered`` is the (p, q) pair when a
    sliding segment starts and ``None`` on a plain crossing.
    """
    try:
        p, q = surface_side_modes(surface, law, x)
    except TangencyError:
        traj.tangency_fallback = True
        return None, law.mode(x)
    if p == q:
        return None, p
    n = surface.fn.gradient(x)
    fp = law.system.subsystems[p - 1](x)
    fq = law.system.subsystems[q - 1](x)
    try:
        alpha = _solve_alpha(n, fp, fq)
    except TangencyError:
        traj.tangency_fallback = True
        return None, law.mode(x)
    attractive = float(n @ fp) > 0.0 and float(n @ fq) < 0.0
    if attractive and 0.0 < alpha < 1.0:
        return (p, q), sigma
    return None, _consistent_mode(surface, law, x, p, q)


# -- diagnostics --------------------------------------------------------------


def lyapunov_trace(v: Pwsclf, traj: Trajectory) -> list[tuple[float, float]]:
    """V along the trajectory; the decrease-property tests consume this."""
    return [(t, clf_value(v, x)) for t, x in zip(traj.times, traj.states)]


def fit_exponential_rate(times, values) -> float:
    """Least-squares slope of log|values| over time (exponential rate)."""
    ts, ys = [], []
    for t, v in zip(times, values):
        if v != 0.0 and np.isfinite(v):
            ts.append(t)
            ys.append(math.log(abs(v)))
    if len(ts) < 2:
        raise ValueError("need at least two nonzero samples to fit a rate")
    coef = np.polyfit(np.asarray(ts), np.asarray(ys), 1)
    return float(coef[0])
