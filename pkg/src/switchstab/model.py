"""Switched-system models with linear or polynomial subsystem fields.

A system is a finite family of vector fields sharing the origin as a common
equilibrium; a state-feedback switching law picks which field drives the
state at each point.  Polynomial fields are stored as explicit monomial
lists so gradients and directional derivatives elsewhere stay closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .linalg import DimensionError, as_matrix, as_vector

__all__ = [
    "SchemaError",
    "EquilibriumError",
    "WeightError",
    "Monomial",
    "poly_eval",
    "poly_partial",
    "poly_gradient",
    "poly_add",
    "poly_scale",
    "poly_mul",
    "poly_normalize",
    "poly_from_linear_row",
    "VectorField",
    "SwitchedSystem",
    "linear_field",
    "polynomial_field",
    "eval_field",
    "eval_convex_combination",
    "load_system",
    "dump_system",
]


class SchemaError(ValueError):
    """A document does not match the system/CLF schema."""


class EquilibriumError(ValueError):
    """Violated invariant: f_i(0) = 0 (no constant monomials allowed)."""


class WeightError(ValueError):
    """Weights are not a probability vector."""


@dataclass(frozen=True)
class Monomial:
    """coefficient * prod_k x_k**exponents[k]"""

    coeff: float
    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if any(e < 0 for e in self.exponents):
            raise SchemaError("monomial exponents must be nonnegative integers")
        if not np.isfinite(self.coeff):
            raise SchemaError("monomial coefficient must be finite")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


Polynomial = tuple  # tuple[Monomial, ...]


def poly_eval(poly, x) -> float:
    total = 0.0
    for m in poly:
        term = m.coeff
        for xk, ek in zip(x, m.exponents):
            if ek:
                term *= xk**ek
        total += term
    return total


def poly_partial(poly, k: int) -> tuple[Monomial, ...]:
    """Term-wise partial derivative with respect to coordinate ``k`` (0-based)."""
    out = []
    for m in poly:
        e = m.exponents[k]
        if e == 0:
            continue
        exps = list(m.exponents)
        exps[k] = e - 1
        out.append(Monomial(m.coeff * e, tuple(exps)))
    return tuple(out)


def poly_gradient(poly, dim: int) -> tuple[tuple[Monomial, ...], ...]:
    return tuple(poly_partial(poly, k) for k in range(dim))


def poly_add(*polys) -> tuple[Monomial, ...]:
    out = []
    for p in polys:
        out.extend(p)
    return poly_normalize(out)


def poly_scale(poly, c: float) -> tuple[Monomial, ...]:
    return tuple(Monomial(c * m.coeff, m.exponents) for m in poly)


def poly_mul(pa, pb) -> tuple[Monomial, ...]:
    out = []
    for ma in pa:
        for mb in pb:
            exps = tuple(ea + eb for ea, eb in zip(ma.exponents, mb.exponents))
            out.append(Monomial(ma.coeff * mb.coeff, exps))
    return poly_normalize(out)


def poly_normalize(poly) -> tuple[Monomial, ...]:
    """Combine like terms, drop zeros, order by exponent tuple."""
    acc: dict[tuple[int, ...], float] = {}
    for m in poly:
        acc[m.exponents] = acc.get(m.exponents, 0.0) + m.coeff
    return tuple(
        Monomial(c, e) for e, c in sorted(acc.items()) if c != 0.0
    )


def poly_from_linear_row(row) -> tuple[Monomial, ...]:
    """The linear form row . x as a monomial list."""
    row = as_vector(row)
    n = row.shape[0]
    out = []
    for k, c in enumerate(row):
        if c != 0.0:
            exps = [0] * n
            exps[k] = 1
            out.append(Monomial(float(c), tuple(exps)))
    return tuple(out)


@dataclass(frozen=True)
class VectorField:
    """One subsystem field: either ``A x`` or componentwise monomial sums."""

    kind: str  # 'linear' | 'polynomial'
    matrix: np.ndarray | None = None
    components: tuple[tuple[Monomial, ...], ...] | None = None

    @property
    def dimension(self) -> int:
        if self.kind == "linear":
            return self.matrix.shape[0]
        return len(self.components)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "linear":
            return self.matrix @ x
        return np.array([poly_eval(c, x) for c in self.components])


def linear_field(a) -> VectorField:
    return VectorField(kind="linear", matrix=as_matrix(a, square=True))


def polynomial_field(components) -> VectorField:
    comps = []
    n = len(components)
    for ci, comp in enumerate(components):
        terms = []
        for m in comp:
            if not isinstance(m, Monomial):
                m = Monomial(float(m[0]), tuple(m[1]))
            if len(m.exponents) != n:
                raise SchemaError(
                    f"components[{ci}]: exponent tuple length {len(m.exponents)} != dimension {n}"
                )
            if m.degree == 0 and m.coeff != 0.0:
                raise EquilibriumError(
                    f"components[{ci}]: constant monomial violates the common "
                    "equilibrium at the origin"
                )
            terms.append(m)
        comps.append(poly_normalize(terms))
    return VectorField(kind="polynomial", components=tuple(comps))


@dataclass(frozen=True)
class SwitchedSystem:
    dimension: int
    subsystems: tuple[VectorField, ...]

    def __post_init__(self):
        if len(self.subsystems) < 1:
            raise SchemaError("a switched system needs at least one subsystem")
        for i, f in enumerate(self.subsystems):
            if f.dimension != self.dimension:
                raise DimensionError(
                    f"subsystems[{i}] has dimension {f.dimension}, expected {self.dimension}"
                )

    @property
    def modes(self) -> int:
        return len(self.subsystems)

    @property
    def is_linear(self) -> bool:
        return all(f.kind == "linear" for f in self.subsystems)


def eval_field(sys: SwitchedSystem, i: int, x) -> np.ndarray:
    """f_i(x) for 1-based mode index ``i``."""
    if not 1 <= i <= sys.modes:
        raise IndexError(f"mode index {i} out of range 1..{sys.modes}")
    return sys.subsystems[i - 1](as_vector(x, sys.dimension))


def eval_convex_combination(sys: SwitchedSystem, weights, x, atol: float = 1e-12) -> np.ndarray:
    """sum_i alpha_i f_i(x) for weights [(mode, alpha), ...] on the simplex."""
    x = as_vector(x, sys.dimension)
    total = 0.0
    out = np.zeros(sys.dimension)
    for i, a in weights:
        if a < -atol:
            raise WeightError(f"negative weight {a} for mode {i}")
        total += a
        out += a * eval_field(sys, i, x)
    if abs(total - 1.0) > atol:
        raise WeightError(f"weights sum to {total}, expected 1")
    return out


# -- document schema ---------------------------------------------------------
#
# { "dimension": n,
#   "subsystems": [ {"kind": "linear", "A": [[...], ...]}
#                 | {"kind": "polynomial",
#                    "components": [[{"coeff": c, "exponents": [e1,...,en]}, ...], ...]} ] }


def _field_from_doc(doc: dict, path: str, n: int) -> VectorField:
    kind = doc.get("kind")
    if kind == "linear":
        try:
            a = as_matrix(doc["A"], square=True)
        except KeyError:
            raise SchemaError(f"{path}: missing field 'A'") from None
        if a.shape[0] != n:
            raise SchemaError(f"{path}.A: shape {a.shape} != ({n}, {n})")
        return linear_field(a)
    if kind == "polynomial":
        comps = doc.get("components")
        if not isinstance(comps, list) or len(comps) != n:
            raise SchemaError(f"{path}.components: expected {n} component lists")
        parsed = []
        for ci, comp in enumerate(comps):
            terms = []
            for ti, t in enumerate(comp):
                try:
                    terms.append(Monomial(float(t["coeff"]), tuple(t["exponents"])))
                except (KeyError, TypeError) as exc:
                    raise SchemaError(
                        f"{path}.components[{ci}][{ti}]: expected coeff/exponents, got {t!r}"
                    ) from exc
            parsed.append(terms)
        return polynomial_field(parsed)
    raise SchemaError(f"{path}.kind: expected 'linear' or 'polynomial', got {kind!r}")


def load_system(document) -> SwitchedSystem:
    """Parse and validate a system document (JSON text or dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"system document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("system document must be a JSON object")
    try:
        n = int(document["dimension"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError("dimension: missing or not an integer") from None
    if n < 1:
        raise SchemaError("dimension: must be >= 1")
    subs = document.get("subsystems")
    if not isinstance(subs, list) or not subs:
        raise SchemaError("subsystems: expected a nonempty list")
    fields = [_field_from_doc(doc, f"subsystems[{i}]", n) for i, doc in enumerate(subs)]
    return SwitchedSystem(dimension=n, subsystems=tuple(fields))


def dump_system(sys: SwitchedSystem) -> dict:
    subs = []
    for f in sys.subsystems:
        if f.kind == "linear":
            subs.append({"kind": "linear", "A": f.matrix.tolist()})
        else:
            subs.append(
                {
                    "kind": "polynomial",
                    "components": [
                        [{"coeff": m.coeff, "exponents": list(m.exponents)} for m in comp]
                        for comp in f.components
                    ],
                }
            )
    return {"dimension": sys.dimension, "subsystems": subs}
