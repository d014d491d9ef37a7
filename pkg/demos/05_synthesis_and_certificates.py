"""Quadratic stabilization search and matrix-inequality certificate checking.

Two saddle subsystems (each unstable alone) admit a stable convex
combination; the simplex search finds the balanced weights, the Lyapunov
solve produces P, and the strict-completeness sampler certifies the
resulting quadratic candidate.  A small matrix-inequality certificate is
then verified eigenvalue by eigenvalue, including a deliberately broken
multiplier to show a failing report with a re-checkable witness.
"""

import numpy as np

import switchstab as ss

a1 = np.array([[1.0, 1.0], [-1.0, -3.0]])
a2 = np.array([[-3.0, 1.0], [-1.0, 1.0]])
system = ss.SwitchedSystem(dimension=2, subsystems=(ss.linear_field(a1),
                                                    ss.linear_field(a2)))

print("determinants:", np.linalg.det(a1), np.linalg.det(a2), "(both saddles)")
alpha, p = ss.search_stable_convex_combination(system, grid=100)
print(f"stable convex combination: alpha = {alpha}")
print(f"P from the Lyapunov solve:\n{p}")

report = ss.check_strict_completeness(p, system, sphere_samples=720)
print(f"strict completeness: {report.verdict} "
      f"(worst sphere margin {report.details['min_derivative_negative']['worst_margin']:.4f})")

# a one-piece certificate for the single stable subsystem dx/dt = -x
single = ss.SwitchedSystem(dimension=2, subsystems=(ss.linear_field(-np.eye(2)),))
good = ss.BmiCertificate(
    P=(np.eye(2),), H=(np.zeros((2, 2)),), eta1=0.5, eta2=0.5,
    xi=np.zeros((1, 1)), gamma=np.zeros((1, 1)), beta=np.zeros((1, 1)),
    zeta=np.ones((1, 1, 1)), lam=np.zeros((1, 1, 1, 1)), alpha=np.ones((1, 1)),
)
rep = ss.verify_bmi_certificate(good, single, "theorem3")
print(f"\ncertificate verdict: {rep.verdict}")
for name, d in rep.details.items():
    print(f"  {name}: margin {d['margin']:+.3f} ({d['sense']})  -> {d['verdict']}")

bad = ss.BmiCertificate(**{**good.__dict__, "eta2": 3.0})
rep = ss.verify_bmi_certificate(bad, single, "theorem3")
wit = rep.witnesses[0]
print(f"\nwith eta2 = 3 the decrease inequality breaks: {rep.verdict}")
print(f"  witness direction {wit['point']}, violation {wit['magnitude']:.3f} "
      f"({wit['detail']})")
