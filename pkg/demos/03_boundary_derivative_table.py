"""Directional derivatives on a nonsmooth boundary, and why the induced law
differs from naive argmin switching there.

A four-mode linear system with a two-piece quadratic candidate V.  At a
point z on the boundary between the pieces the per-piece derivative table
and the true one-sided derivatives select different mode sets: the induced
law works piecewise (table minimum -20, modes {1, 2}), while the one-sided
argmin rule sees -12 attained by modes {1, 3}.  The boundary stability
condition is then checked numerically along the sliding line.
"""

import json

import numpy as np

import switchstab as ss
from switchstab import fixtures

system = ss.load_system(json.dumps(fixtures.EX3_SYSTEM))
v = ss.load_clf(json.dumps(fixtures.EX3_CLF))
law = ss.SwitchingLaw(system, v)

z = np.array([1.0, 1.0])
diag = ss.argmin_diagnostic(v, system, z)

print(f"active pieces at z = (1, 1): {sorted(diag.pieces)}")
print("per-piece derivative table DV_j(z; f_i(z)):")
for j, row in zip(diag.pieces, diag.table):
    print(f"  piece {j}: " + "  ".join(f"{val:+8.3f}" for val in row))
print(f"table minimum {diag.table_min:+.3f} attained by modes "
      f"{sorted(diag.table_min_modes)}")
print(f"one-sided DV(z; f_i(z)) = {np.round(diag.onesided, 3)}")
print(f"one-sided minimum {diag.onesided_min:+.3f} attained by modes "
      f"{sorted(diag.onesided_modes)}")

print(f"\nnu(z) = {law.mode(z)}")
print(f"I_sm(z) = {sorted(ss.sliding_candidate_modes(law, z))}")
for j in (1, 2):
    print(f"M_{j}(z) = {sorted(ss.boundary_limit_modes(law, j, z))}")

# Along the sliding line x1 = x2 the second piece decreases along mode 1's
# field at rate -6||x||^2, which certifies stable sliding there.
x = np.array([0.7, 0.7])
dv = ss.piece_directional_derivative(v, 2, x, ss.eval_field(system, 1, x))
print(f"\nDV_2(x; f_1(x)) at x = (0.7, 0.7): {dv:.6f} = -6||x||^2 = {-6 * (x @ x):.6f}")

report = ss.check_condition_12(v, ss.quadratic_rate(1.0), law, boundary_samples=100)
print(f"boundary condition check: {report.verdict} "
      f"({report.details['examined']} boundary points examined, "
      f"{report.details['vacuous']} off the switching boundary)")
