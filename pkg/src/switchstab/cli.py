"""Command-line front end.

Subcommands: ``simulate``, ``certify``, ``synthesize-quadratic``,
``example`` (bundled reproductions), and ``replay`` (re-run a manifest).
Every command writes a manifest next to its outputs; outputs are
deterministic, so replaying a manifest reproduces them byte for byte.

Exit codes: 0 success / all pass; 1 validation or usage error;
2 simulation stopped at the divergence bound; 3 a certification check or an
embedded example expectation failed; 4 certification inconclusive without
failures; 5 no stable convex combination found.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, certify, fixtures
from .clf import load_clf, polynomial_rate, quadratic_rate
from .fsim import SimConfig, fit_exponential_rate, simulate_filippov, simulate_relay
from .model import SchemaError, load_system
from .switchlaw import SwitchingLaw, candidate_surfaces, linear_fn, load_region_law, SlidingSurface

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_DIVERGED = 2
EXIT_FAIL = 3
EXIT_INCONCLUSIVE = 4
EXIT_NO_COMBINATION = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); the contract is 1
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="switchstab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate the closed loop")
    sim.add_argument("--system", required=True)
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--clf")
    group.add_argument("--region-law")
    sim.add_argument("--x0", required=True, help="comma-separated initial state")
    sim.add_argument("--t-final", type=float, required=True)
    sim.add_argument("--step", type=float, required=True)
    sim.add_argument("--hysteresis", type=float, default=0.0)
    sim.add_argument("--mode", choices=["relay", "filippov"], default="relay")
    sim.add_argument("--relay-rule", choices=["distance", "margin"], default="distance")
    sim.add_argument("--event-tolerance", type=float, default=1e-9)
    sim.add_argument("--out", required=True)

    cert = sub.add_parser("certify", help="run certificate checks")
    cert.add_argument("--system", required=True)
    cert.add_argument("--clf", required=True)
    cert.add_argument("--rate", default="quad:1.0",
                      help="'quad:<eta>' or 'poly:<json file>'")
    cert.add_argument("--checks", default="psclf",
                      help="comma list from psclf,cond12,q,m,completeness")
    cert.add_argument("--samples", type=int, default=720)
    cert.add_argument("--out", required=True)

    syn = sub.add_parser("synthesize-quadratic", help="stable convex combination search")
    syn.add_argument("--system", required=True)
    syn.add_argument("--grid", type=int, default=100)
    syn.add_argument("--out", required=True)

    exa = sub.add_parser("example", help="run a bundled reproduction")
    exa.add_argument("name", choices=["ex1", "ex2", "ex3", "nonlinear"])
    exa.add_argument("--outdir", required=True)

    rep = sub.add_parser("replay", help="re-run a command from its manifest")
    rep.add_argument("manifest")
    return parser


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_manifest(out_paths: list[Path], argv: list[str], command: str,
                    inputs: dict, config: dict) -> None:
    manifest = {
        "tool": "switchstab",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "inputs": inputs,
        "config": config,
        "outputs": [str(p) for p in out_paths],
    }
    _write_json(Path(str(out_paths[0]) + ".manifest.json"), manifest)


def _load_law(args) -> tuple:
    system = load_system(Path(args.system).read_text())
    if args.clf:
        v = load_clf(Path(args.clf).read_text())
        return system, SwitchingLaw(system, v), v
    law_doc = json.loads(Path(args.region_law).read_text())
    return system, load_region_law(law_doc, system), None


def _cmd_simulate(args, argv) -> int:
    system, law, v = _load_law(args)
    x0 = np.array([float(t) for t in args.x0.split(",")])
    cfg = SimConfig(
        step=args.step,
        t_final=args.t_final,
        hysteresis=args.hysteresis,
        mode=args.mode,
        event_tolerance=args.event_tolerance,
        relay_rule=args.relay_rule,
    )
    if args.mode == "relay":
        traj = simulate_relay(law, x0, cfg)
    else:
        traj = simulate_filippov(law, candidate_surfaces(law), x0, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    traj.to_csv(out)
    _write_manifest(
        [out], argv, "simulate",
        {"system": args.system, "clf": args.clf, "region_law": args.region_law},
        {"x0": x0.tolist(), "step": cfg.step, "t_final": cfg.t_final,
         "hysteresis": cfg.hysteresis, "mode": cfg.mode,
         "relay_rule": cfg.relay_rule, "event_tolerance": cfg.event_tolerance,
         "divergence_bound": cfg.divergence_bound},
    )
    return EXIT_DIVERGED if traj.diverged else EXIT_OK


def _parse_rate(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "quad":
        return quadratic_rate(float(rest or "1.0"))
    if kind == "poly":
        doc = json.loads(Path(rest).read_text())
        return polynomial_rate(
            [(float(t["coeff"]), tuple(t["exponents"])) for t in doc["poly"]]
        )
    raise SchemaError(f"unknown rate spec {spec!r}")


def _cmd_certify(args, argv) -> int:
    system = load_system(Path(args.system).read_text())
    v = load_clf(Path(args.clf).read_text())
    w = _parse_rate(args.rate)
    wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
    reports = []
    for check in wanted:
        if check == "psclf":
            reports.append(certify.check_psclf(v, w, system, samples=args.samples))
        elif check == "cond12":
            law = SwitchingLaw(system, v)
            reports.append(certify.check_condition_12(v, w, law,
                                                      boundary_samples=args.samples))
        elif check == "q":
            reports.append(certify.check_largest_region_conditions(
                v, w, system, sphere_samples=args.samples))
        elif check == "m":
            reports.append(certify.check_pointwise_max_conditions(
                v, w, system, sphere_samples=args.samples))
        elif check == "completeness":
            if v.kind != "smooth_quadratic":
                raise SchemaError("completeness requires a smooth_quadratic CLF")
            reports.append(certify.check_strict_completeness(
                v.pieces[0], system, sphere_samples=args.samples))
        else:
            raise SchemaError(f"unknown check {check!r}")
    out = Path(args.out)
    _write_json(out, {"reports": [r.to_dict() for r in reports]})
    _write_manifest(
        [out], argv, "certify",
        {"system": args.system, "clf": args.clf},
        {"rate": args.rate, "checks": wanted, "samples": args.samples},
    )
    verdicts = {r.verdict for r in reports}
    if "fail" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_synthesize(args, argv) -> int:
    system = load_system(Path(args.system).read_text())
    result = certify.search_stable_convex_combination(system, grid=args.grid)
    out = Path(args.out)
    if result is None:
        _write_json(out, {"found": False, "grid": args.grid})
        _write_manifest([out], argv, "synthesize-quadratic",
                        {"system": args.system}, {"grid": args.grid})
        return EXIT_NO_COMBINATION
    alpha, p = result
    _write_json(out, {"found": True, "grid": args.grid,
                      "alpha": alpha.tolist(), "P": p.tolist()})
    _write_manifest([out], argv, "synthesize-quadratic",
                    {"system": args.system}, {"grid": args.grid})
    return EXIT_OK


# -- bundled example reproductions ---------------------------------------------


def _expect(summary, name, source, computed, expected, ok):
    summary.append({
        "name": name,
        "source": source,
        "computed": computed,
        "expected": expected,
        "ok": bool(ok),
    })


def _sliding_rate(traj, coord: int) -> float:
    ts = [t for t, s in zip(traj.times, traj.sliding) if s]
    vs = [x[coord] for x, s in zip(traj.states, traj.sliding) if s]
    return fit_exponential_rate(ts, vs)


def _run_ex1(outdir: Path, summary: list) -> list[Path]:
    system = load_system(json.dumps(fixtures.EX1_SYSTEM))
    law = load_region_law(fixtures.EX1_REGION_LAW, system)
    surfaces = [SlidingSurface(fn=linear_fn([1.0, 0.0]))]
    outputs = []

    cfg = SimConfig(step=1e-3, t_final=5.0, mode="filippov", event_tolerance=1e-9)
    traj = simulate_filippov(law, surfaces, [0.5, -2.0], cfg)
    path = outdir / "ex1_filippov.csv"
    traj.to_csv(path)
    outputs.append(path)
    rate = _sliding_rate(traj, 1)
    _expect(summary, "sliding_growth_rate_x2", "derived (alpha=1/2 gives dx2/dt=2*x2)",
            rate, [1.9, 2.1], 1.9 <= rate <= 2.1)

    for delta in (0.1, 0.01):
        cfg = SimConfig(step=1e-4, t_final=10.0, hysteresis=delta, mode="relay")
        traj = simulate_relay(law, [0.5, -2.0], cfg)
        path = outdir / f"ex1_relay_d{delta}.csv"
        traj.to_csv(path)
        outputs.append(path)
        t100 = next((t for t, x in zip(traj.times, traj.states) if x @ x > 100.0**2),
                    None)
        _expect(summary, f"relay_{delta}_diverges_past_100_by_t5", "reference (qualitative divergence)",
                t100, "t <= 5", t100 is not None and t100 <= 5.0)
        _expect(summary, f"relay_{delta}_divergence_stop", "reference (qualitative divergence)",
                traj.diverged, True, traj.diverged)
    return outputs


def _run_ex2(outdir: Path, summary: list) -> list[Path]:
    system = load_system(json.dumps(fixtures.EX2_SYSTEM))
    law = load_region_law(fixtures.EX2_REGION_LAW, system)
    surfaces = [SlidingSurface(fn=linear_fn([0.0, 1.0])),
                SlidingSurface(fn=linear_fn([1.0, 0.0]))]
    outputs = []

    cfg = SimConfig(step=1e-3, t_final=5.0, mode="filippov", event_tolerance=1e-9)
    traj = simulate_filippov(law, surfaces, [1.0, 0.2], cfg)
    path = outdir / "ex2_filippov.csv"
    traj.to_csv(path)
    outputs.append(path)
    rate = _sliding_rate(traj, 0)
    _expect(summary, "sliding_decay_rate_x1", "derived (alpha=1/2 gives dx1/dt=-3*x1)",
            rate, [-3.15, -2.85], -3.15 <= rate <= -2.85)

    cfg = SimConfig(step=1e-3, t_final=10.0, hysteresis=0.1, mode="relay")
    traj = simulate_relay(law, [0.0, -0.5], cfg)
    path = outdir / "ex2_relay_d0.1.csv"
    traj.to_csv(path)
    outputs.append(path)
    final = float(np.sqrt(traj.final_state @ traj.final_state))
    _expect(summary, "relay_0.1_final_norm", "reference (qualitative convergence)",
            final, "<= 0.1", final <= 0.1)
    return outputs


def _run_ex3(outdir: Path, summary: list) -> list[Path]:
    system = load_system(json.dumps(fixtures.EX3_SYSTEM))
    v = load_clf(json.dumps(fixtures.EX3_CLF))
    law = SwitchingLaw(system, v)
    z = np.array([1.0, 1.0])
    diag = certify.argmin_diagnostic(v, system, z)
    expected_table = [[-20.0, -20.0 / 3.0, -16.0, 4.0], [-12.0, -20.0, -12.0, 0.0]]
    ok = np.max(np.abs(diag.table - np.array(expected_table))) <= 1e-12
    _expect(summary, "derivative_table_at_z", "reference (boundary derivative table)",
            diag.table.tolist(), expected_table, ok)
    _expect(summary, "table_min", "reference", diag.table_min, -20.0,
            abs(diag.table_min + 20.0) <= 1e-12)
    _expect(summary, "table_min_modes", "reference", sorted(diag.table_min_modes), [1, 2],
            diag.table_min_modes == frozenset({1, 2}))
    _expect(summary, "onesided_min", "reference", diag.onesided_min, -12.0,
            abs(diag.onesided_min + 12.0) <= 1e-12)
    _expect(summary, "onesided_modes", "reference", sorted(diag.onesided_modes), [1, 3],
            diag.onesided_modes == frozenset({1, 3}))
    _expect(summary, "nu_at_z", "derived (least tied index)", law.mode(z), 1,
            law.mode(z) == 1)

    from .switchlaw import boundary_limit_modes, sliding_candidate_modes

    ism = sliding_candidate_modes(law, z)
    _expect(summary, "I_sm_at_z", "reference", sorted(ism), [1, 2], ism == {1, 2})
    m1 = boundary_limit_modes(law, 1, z)
    m2 = boundary_limit_modes(law, 2, z)
    _expect(summary, "M1_at_z", "reference", sorted(m1), [1], m1 == {1})
    _expect(summary, "M2_at_z", "reference", sorted(m2), [2], m2 == {2})

    from .clf import piece_directional_derivative
    from .model import eval_field

    worst = 0.0
    for t in np.linspace(0.1, 2.0, 100):
        x = np.array([t, t])
        dv = piece_directional_derivative(v, 2, x, eval_field(system, 1, x))
        worst = max(worst, abs(dv + 6.0 * float(x @ x)) / (1.0 + 6.0 * float(x @ x)))
    _expect(summary, "DV2_f1_on_S1", "reference (DV_2(x;f_1(x)) = -6||x||^2)",
            worst, "<= 1e-9", worst <= 1e-9)

    w = quadratic_rate(1.0)
    report = certify.check_condition_12(v, w, law, boundary_samples=100)
    path = outdir / "ex3_cond12.json"
    _write_json(path, report.to_dict())
    _expect(summary, "cond12_pass", "reference (boundary condition holds)",
            report.verdict, "pass", report.verdict == "pass")

    psclf_report = certify.check_psclf(v, w, system, samples=720)
    path2 = outdir / "ex3_psclf.json"
    _write_json(path2, psclf_report.to_dict())
    # Not an expectation: on the x1 axis every subsystem field is vertical
    # while grad V_1 is horizontal, so min_i DV = 0 there and no strictly
    # positive rate W can satisfy the decrease condition.  The honest verdict
    # is recorded for inspection.
    return [path, path2]


def _run_nonlinear(outdir: Path, summary: list) -> list[Path]:
    system = load_system(json.dumps(fixtures.NONLINEAR_SYSTEM))
    v = load_clf(json.dumps(fixtures.NONLINEAR_CLF))
    law = SwitchingLaw(system, v)
    outputs = []

    from .clf import directional_derivative
    from .model import eval_field

    axis = np.linspace(-2.0, 2.0, 101)
    worst = 0.0
    for x1 in axis:
        for x2 in axis:
            x = np.array([x1, x2])
            got = min(
                directional_derivative(v, x, eval_field(system, i, x)) for i in (1, 2)
            )
            want = -abs(4.0 * x1**4 - 4.0 * x2**2) - 2.0 * x2**2
            worst = max(worst, abs(got - want))
    _expect(summary, "min_DV_identity_on_grid", "reference (closed-form decrease identity)",
            worst, "<= 1e-12", worst <= 1e-12)

    for tag, x0 in (("a", [1.0, 0.0]), ("b", [0.0, -1.0])):
        cfg = SimConfig(step=1e-3, t_final=20.0, hysteresis=0.01, mode="relay")
        traj = simulate_relay(law, x0, cfg)
        path = outdir / f"nonlinear_relay_{tag}.csv"
        traj.to_csv(path)
        outputs.append(path)
        final = float(np.sqrt(traj.final_state @ traj.final_state))
        frac = traj.sliding_fraction()
        _expect(summary, f"relay_{tag}_final_norm", "reference (qualitative convergence with sliding)",
                final, "< 0.05", final < 0.05)
        _expect(summary, f"relay_{tag}_sliding_fraction", "reference (qualitative convergence with sliding)",
                frac, "> 0.01", frac > 0.01)

    w = polynomial_rate([(2.0, (0, 2))])
    report = certify.check_psclf(v, w, system, samples=10000)
    path = outdir / "nonlinear_psclf.json"
    _write_json(path, report.to_dict())
    outputs.append(path)
    _expect(summary, "psclf_decreasing_passes", "derived (identity above)",
            report.details["decreasing"]["verdict"], "pass",
            report.details["decreasing"]["verdict"] == "pass")
    _expect(summary, "psclf_W_semidefinite_flagged", "derived (W = 2*x2^2 vanishes on x2=0)",
            report.details["W_positive"]["verdict"], "inconclusive",
            report.details["W_positive"]["verdict"] == "inconclusive")
    return outputs


def _cmd_example(args, argv) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fixture = fixtures.EXAMPLES[args.name]
    for key, doc in fixture.items():
        _write_json(outdir / f"{args.name}_{key}.json", doc)
    summary: list[dict] = []
    runner = {
        "ex1": _run_ex1, "ex2": _run_ex2, "ex3": _run_ex3, "nonlinear": _run_nonlinear,
    }[args.name]
    outputs = runner(outdir, summary)
    summary_path = outdir / "summary.json"
    all_ok = all(item["ok"] for item in summary)
    _write_json(summary_path, {"example": args.name, "all_ok": all_ok,
                               "expectations": summary})
    _write_manifest([summary_path], argv, "example",
                    {"name": args.name},
                    {"outdir": str(outdir), "outputs": [str(p) for p in outputs]})
    for item in summary:
        status = "ok" if item["ok"] else "FAIL"
        print(f"[{status}] {item['name']}: {item['computed']}")
    return EXIT_OK if all_ok else EXIT_FAIL


def _cmd_replay(args, argv) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    return main(manifest["argv"])


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args, argv)
        if args.command == "certify":
            return _cmd_certify(args, argv)
        if args.command == "synthesize-quadratic":
            return _cmd_synthesize(args, argv)
        if args.command == "example":
            return _cmd_example(args, argv)
        if args.command == "replay":
            return _cmd_replay(args, argv)
        raise _UsageError("no command given")
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except (SchemaError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
