import json

import numpy as np
import pytest

from switchstab import fixtures
from switchstab.model import (
    EquilibriumError,
    Monomial,
    SchemaError,
    WeightError,
    dump_system,
    eval_convex_combination,
    eval_field,
    linear_field,
    load_system,
    polynomial_field,
    poly_eval,
    poly_gradient,
    poly_mul,
    SwitchedSystem,
)


@pytest.fixture
def ex1():
    return load_system(json.dumps(fixtures.EX1_SYSTEM))


@pytest.fixture
def nonlinear():
    return load_system(json.dumps(fixtures.NONLINEAR_SYSTEM))


def test_eval_field_linear(ex1):
    # hand matrix-vector product: [[-3,-1],[12,2]] @ [0.5,-2] = [0.5, 2]
    assert np.allclose(eval_field(ex1, 1, [0.5, -2.0]), [0.5, 2.0])


def test_eval_field_polynomial(nonlinear):
    # substitute x = (1, 0) into the first polynomial subsystem
    assert np.allclose(eval_field(nonlinear, 1, [1.0, 0.0]), [-1.0, 1.0])


def test_eval_field_common_equilibrium(ex1, nonlinear):
    for sys in (ex1, nonlinear):
        for i in range(1, sys.modes + 1):
            assert np.allclose(eval_field(sys, i, np.zeros(2)), 0.0)


def test_eval_field_index_range(ex1):
    with pytest.raises(IndexError):
        eval_field(ex1, 0, [1.0, 0.0])
    with pytest.raises(IndexError):
        eval_field(ex1, 3, [1.0, 0.0])


def test_convex_combination_sliding_velocity(ex1):
    # average of the two fields on x1 = 0 gives (0, 2 x2)
    v = eval_convex_combination(ex1, [(1, 0.5), (2, 0.5)], [0.0, 1.0])
    assert np.allclose(v, [0.0, 2.0])


def test_convex_combination_single_mode(ex1):
    x = [0.3, -1.2]
    assert np.allclose(
        eval_convex_combination(ex1, [(1, 1.0)], x), eval_field(ex1, 1, x)
    )


def test_convex_combination_ex2_drift(ex1):
    # sliding drift on x2 = 0: dx1/dt = -3 x1
    v = eval_convex_combination(ex1, [(1, 0.5), (2, 0.5)], [1.0, 0.0])
    assert np.allclose(v, [-3.0, 0.0])


def test_convex_combination_validation(ex1):
    with pytest.raises(WeightError):
        eval_convex_combination(ex1, [(1, 0.7), (2, 0.2)], [1.0, 0.0])
    with pytest.raises(WeightError):
        eval_convex_combination(ex1, [(1, 1.5), (2, -0.5)], [1.0, 0.0])


def test_load_system_examples():
    sys1 = load_system(json.dumps(fixtures.EX1_SYSTEM))
    assert sys1.modes == 2 and sys1.dimension == 2 and sys1.is_linear
    sysn = load_system(json.dumps(fixtures.NONLINEAR_SYSTEM))
    assert sysn.modes == 2 and not sysn.is_linear


def test_load_system_rejects_constant_monomial():
    doc = {
        "dimension": 1,
        "subsystems": [
            {"kind": "polynomial", "components": [[{"coeff": 1.0, "exponents": [0]}]]}
        ],
    }
    with pytest.raises(EquilibriumError):
        load_system(json.dumps(doc))


def test_load_system_schema_errors():
    with pytest.raises(SchemaError):
        load_system("not json")
    with pytest.raises(SchemaError):
        load_system(json.dumps({"dimension": 2, "subsystems": []}))
    with pytest.raises(SchemaError):
        load_system(json.dumps({"dimension": 2, "subsystems": [{"kind": "spline"}]}))
    with pytest.raises(SchemaError):
        load_system(
            json.dumps({"dimension": 2, "subsystems": [{"kind": "linear", "A": [[1.0]]}]})
        )


def test_roundtrip_is_identity():
    for doc in (fixtures.EX1_SYSTEM, fixtures.EX3_SYSTEM, fixtures.NONLINEAR_SYSTEM):
        sys = load_system(json.dumps(doc))
        again = load_system(json.dumps(dump_system(sys)))
        assert again.dimension == sys.dimension and again.modes == sys.modes
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.standard_normal(sys.dimension)
            for i in range(1, sys.modes + 1):
                assert np.allclose(eval_field(sys, i, x), eval_field(again, i, x))


def test_linear_homogeneity_random():
    rng = np.random.default_rng(5)
    sys = load_system(json.dumps(fixtures.EX1_SYSTEM))
    for _ in range(200):
        x = rng.standard_normal(2)
        lam = rng.uniform(0.1, 10.0)
        for i in (1, 2):
            assert np.allclose(
                eval_field(sys, i, lam * x), lam * eval_field(sys, i, x)
            )


def test_convex_combination_affine_in_weights():
    rng = np.random.default_rng(6)
    sys = load_system(json.dumps(fixtures.NONLINEAR_SYSTEM))
    for _ in range(200):
        x = rng.standard_normal(2)
        a = rng.uniform(0.0, 1.0)
        b = rng.uniform(0.0, 1.0)
        mid = 0.5 * (a + b)
        va = eval_convex_combination(sys, [(1, a), (2, 1 - a)], x)
        vb = eval_convex_combination(sys, [(1, b), (2, 1 - b)], x)
        vm = eval_convex_combination(sys, [(1, mid), (2, 1 - mid)], x)
        assert np.max(np.abs(vm - 0.5 * (va + vb))) <= 1e-12 * (1 + np.max(np.abs(vm)))


def test_poly_helpers():
    # d/dx (x^3 y) = 3 x^2 y ; d/dy = x^3
    p = (Monomial(1.0, (3, 1)),)
    gx, gy = poly_gradient(p, 2)
    assert poly_eval(gx, [2.0, 5.0]) == 60.0
    assert poly_eval(gy, [2.0, 5.0]) == 8.0
    prod = poly_mul(p, (Monomial(2.0, (0, 1)),))
    assert poly_eval(prod, [2.0, 3.0]) == 2.0 * 8.0 * 9.0


def test_vectorfield_validation():
    with pytest.raises(Exception):
        SwitchedSystem(dimension=2, subsystems=())
    with pytest.raises(SchemaError):
        polynomial_field([[Monomial(1.0, (1,))], [Monomial(1.0, (0, 1))]])
    f = linear_field(np.eye(2))
    assert f.dimension == 2
