"""Embedded fixture documents for the four bundled reproduction examples.

``ex1``/``ex2`` are the two planar piecewise-linear systems with hand-given
region laws (unstable and stable sliding), ``ex3`` is the four-mode system
with the two-piece quadratic candidate whose boundary derivative table the
diagnostics reproduce, and ``nonlinear`` is the polynomial system with the
smooth quartic candidate.
"""

from __future__ import annotations

A_EX1 = [[-3.0, -1.0], [12.0, 2.0]]
B_EX1 = [[-3.0, 1.0], [-12.0, 2.0]]

EX1_SYSTEM = {
    "dimension": 2,
    "subsystems": [
        {"kind": "linear", "A": A_EX1},
        {"kind": "linear", "A": B_EX1},
    ],
}

# mode 1 on {x1 > 0}, mode 2 on {x1 < 0}
EX1_REGION_LAW = {
    "regions": [
        {"kind": "linear", "a": [1.0, 0.0]},
        {"kind": "linear", "a": [-1.0, 0.0]},
    ]
}

EX2_SYSTEM = EX1_SYSTEM

# mode 1 on the 2nd/4th quadrants, mode 2 on the 1st/3rd
EX2_REGION_LAW = {
    "regions": [
        {"kind": "quadratic", "S": [[0.0, -0.5], [-0.5, 0.0]]},
        {"kind": "quadratic", "S": [[0.0, 0.5], [0.5, 0.0]]},
    ]
}

EX3_SYSTEM = {
    "dimension": 2,
    "subsystems": [
        {"kind": "linear", "A": [[0.0, -4.0], [-2.0, 0.0]]},
        {"kind": "linear", "A": [[0.0, 0.0], [-10.0 / 3.0, 0.0]]},
        {"kind": "linear", "A": [[0.0, -3.0], [-2.0, 0.0]]},
        {"kind": "linear", "A": [[0.0, 1.0], [1.0, -1.0]]},
    ],
}

P1_EX3 = [[2.0, 0.0], [0.0, 1.0]]
P2_EX3 = [[1.0, -1.0], [-1.0, 4.0]]

# H1 = P1 - P2, H2 = 0: the sign of x'(P1-P2)x selects the piece
EX3_CLF = {
    "kind": "piecewise_quadratic",
    "P": [P1_EX3, P2_EX3],
    "H": [[[1.0, 1.0], [1.0, -3.0]], [[0.0, 0.0], [0.0, 0.0]]],
}

NONLINEAR_SYSTEM = {
    "dimension": 2,
    "subsystems": [
        {
            "kind": "polynomial",
            "components": [
                [{"coeff": -1.0, "exponents": [1, 0]}, {"coeff": -1.0, "exponents": [0, 1]}],
                [{"coeff": 1.0, "exponents": [3, 0]}, {"coeff": 0.5, "exponents": [0, 1]}],
            ],
        },
        {
            "kind": "polynomial",
            "components": [
                [{"coeff": 1.0, "exponents": [1, 0]}, {"coeff": -1.0, "exponents": [0, 1]}],
                [{"coeff": 1.0, "exponents": [3, 0]}, {"coeff": -1.5, "exponents": [0, 1]}],
            ],
        },
    ],
}

# V(x) = x1^4 + 2 x2^2
NONLINEAR_CLF = {
    "kind": "smooth_polynomial",
    "poly": [
        {"coeff": 1.0, "exponents": [4, 0]},
        {"coeff": 2.0, "exponents": [0, 2]},
    ],
}

EXAMPLES = {
    "ex1": {"system": EX1_SYSTEM, "region_law": EX1_REGION_LAW},
    "ex2": {"system": EX2_SYSTEM, "region_law": EX2_REGION_LAW},
    "ex3": {"system": EX3_SYSTEM, "clf": EX3_CLF},
    "nonlinear": {"system": NONLINEAR_SYSTEM, "clf": NONLINEAR_CLF},
}
