import json

import numpy as np
import pytest

from switchstab import fixtures
from switchstab.clf import (
    DiscontinuityError,
    PieceInactiveError,
    active_pieces,
    directional_derivative,
    dump_clf,
    load_clf,
    piece_directional_derivative,
    piece_gradient,
    piecewise_quadratic,
    pointwise_max,
    pointwise_min,
    polynomial_rate,
    quadratic_rate,
    rate_value,
    smooth_polynomial,
    smooth_quadratic,
    value,
)
from switchstab.model import Monomial, SchemaError, eval_field, load_system

Z = np.array([1.0, 1.0])


@pytest.fixture
def v3():
    return load_clf(json.dumps(fixtures.EX3_CLF))


@pytest.fixture
def sys3():
    return load_system(json.dumps(fixtures.EX3_SYSTEM))


@pytest.fixture
def vq():
    return load_clf(json.dumps(fixtures.NONLINEAR_CLF))


def test_value_on_boundary(v3):
    # both pieces give 3 on the surface x1 = x2
    assert value(v3, Z) == pytest.approx(3.0, abs=1e-14)


def test_value_at_origin(v3, vq):
    for v in (v3, vq, smooth_quadratic(np.eye(2)), pointwise_min([np.eye(2), 2 * np.eye(2)])):
        assert value(v, np.zeros(2)) == 0.0


def test_value_quartic(vq):
    assert value(vq, [1.0, 0.0]) == pytest.approx(1.0, abs=1e-15)
    assert value(vq, [1.0, 2.0]) == pytest.approx(9.0, abs=1e-14)


def test_active_pieces(v3):
    assert active_pieces(v3, Z) == {1, 2}
    # x'(P1-P2)x = 1 > 0 selects the first region
    assert active_pieces(v3, [1.0, 0.0]) == {1}
    assert active_pieces(v3, [0.0, 1.0]) == {2}
    assert active_pieces(v3, np.zeros(2)) == {1, 2}


def test_active_pieces_smooth(vq):
    assert active_pieces(vq, [0.3, -0.7]) == {1}


def test_piece_gradient(v3, vq):
    assert np.allclose(piece_gradient(v3, 1, Z), [4.0, 2.0])
    assert np.allclose(piece_gradient(v3, 2, Z), [0.0, 6.0])
    assert np.allclose(piece_gradient(v3, 1, np.zeros(2)), 0.0)
    # gradient of x1^4 + 2 x2^2
    assert np.allclose(piece_gradient(vq, 1, [1.0, 1.0]), [4.0, 4.0])


def test_piece_gradient_inactive(v3):
    with pytest.raises(PieceInactiveError):
        piece_gradient(v3, 2, [1.0, 0.0])


def test_piece_directional_derivatives_table(v3, sys3):
    # the eight boundary values at z = (1, 1)
    expected = {
        (1, 1): -20.0, (1, 2): -20.0 / 3.0, (1, 3): -16.0, (1, 4): 4.0,
        (2, 1): -12.0, (2, 2): -20.0, (2, 3): -12.0, (2, 4): 0.0,
    }
    for (j, i), want in expected.items():
        eta = eval_field(sys3, i, Z)
        assert piece_directional_derivative(v3, j, Z, eta) == pytest.approx(want, abs=1e-12)


def test_piece_directional_derivative_zero_direction(v3):
    assert piece_directional_derivative(v3, 1, Z, np.zeros(2)) == 0.0


def test_onesided_derivative_on_boundary(v3, sys3):
    # the ray z + d*f_i(z) enters the region that the slope of x'(P1-P2)x picks
    want = {1: -12.0, 2: -20.0 / 3.0, 3: -12.0, 4: 4.0}
    for i, expected in want.items():
        eta = eval_field(sys3, i, Z)
        assert directional_derivative(v3, Z, eta) == pytest.approx(expected, abs=1e-12)


def test_onesided_matches_finite_difference_on_boundary(v3, sys3):
    delta = 1e-7
    for i in range(1, 5):
        eta = eval_field(sys3, i, Z)
        fd = (value(v3, Z + delta * eta) - value(v3, Z)) / delta
        dd = directional_derivative(v3, Z, eta)
        assert abs(fd - dd) <= 1e-4 * (1.0 + abs(dd))


def test_pointwise_min_interior(vq):
    v = pointwise_min([np.eye(2), 2.0 * np.eye(2)])
    x, eta = np.array([1.0, 0.0]), np.array([1.0, 0.0])
    assert active_pieces(v, x) == {1}
    assert directional_derivative(v, x, eta) == pytest.approx(2.0, abs=1e-14)


def test_pointwise_min_max_boundary_rule():
    p1, p2 = np.diag([1.0, 2.0]), np.diag([2.0, 1.0])
    x = np.array([1.0, 1.0])  # tie point
    eta = np.array([1.0, 0.0])
    vmin = pointwise_min([p1, p2])
    vmax = pointwise_max([p1, p2])
    d1 = float(piece_gradient(vmin, 1, x) @ eta)
    d2 = float(piece_gradient(vmin, 2, x) @ eta)
    assert directional_derivative(vmin, x, eta) == pytest.approx(min(d1, d2))
    assert directional_derivative(vmax, x, eta) == pytest.approx(max(d1, d2))
    # one-sided limits against the evaluated min/max
    for v in (vmin, vmax):
        fd = (value(v, x + 1e-7 * eta) - value(v, x)) / 1e-7
        assert abs(fd - directional_derivative(v, x, eta)) <= 1e-4


def test_finite_difference_random_all_kinds(v3, vq):
    rng = np.random.default_rng(7)
    kinds = [
        v3,
        vq,
        smooth_quadratic(np.array([[2.0, 0.5], [0.5, 1.0]])),
        pointwise_min([np.diag([1.0, 2.0]), np.diag([2.0, 1.0])]),
        pointwise_max([np.diag([1.0, 2.0]), np.diag([2.0, 1.0])]),
    ]
    delta = 1e-6
    for _ in range(1000):
        v = kinds[int(rng.integers(len(kinds)))]
        x = rng.uniform(-1.5, 1.5, 2)
        eta = rng.uniform(-1.0, 1.0, 2)
        dd = directional_derivative(v, x, eta)
        fd = (value(v, x + delta * eta) - value(v, x)) / delta
        assert abs(fd - dd) <= 1e-4 * (1.0 + abs(dd))


def test_continuity_on_sampled_boundary(v3):
    # V_1 = V_2 exactly on x1 = x2 and on x1 = -3 x2
    for t in np.linspace(-2, 2, 101):
        if t == 0.0:
            continue
        for x in (np.array([t, t]), np.array([-3.0 * t, t])):
            gap = abs(float(x @ v3.pieces[0] @ x) - float(x @ v3.pieces[1] @ x))
            assert gap <= 1e-9 * (1.0 + float(x @ x))


def test_degree_two_homogeneity(v3):
    rng = np.random.default_rng(8)
    for _ in range(500):
        x = rng.standard_normal(2)
        eta = rng.standard_normal(2)
        lam = rng.uniform(0.05, 20.0)
        assert value(v3, lam * x) == pytest.approx(lam**2 * value(v3, x), rel=1e-10)
        assert directional_derivative(v3, lam * x, lam * eta) == pytest.approx(
            lam**2 * directional_derivative(v3, x, eta), rel=1e-9, abs=1e-12
        )


def test_pointwise_min_bound_property():
    rng = np.random.default_rng(9)
    p1, p2 = np.diag([1.0, 3.0]), np.diag([3.0, 1.0])
    vmin = pointwise_min([p1, p2])
    vmax = pointwise_max([p1, p2])
    for _ in range(200):
        t = rng.uniform(-2, 2)
        if t == 0:
            continue
        x = np.array([t, t])  # boundary of both partitions
        eta = rng.standard_normal(2)
        dmin = directional_derivative(vmin, x, eta)
        dmax = directional_derivative(vmax, x, eta)
        for j in active_pieces(vmin, x):
            assert dmin <= piece_directional_derivative(vmin, j, x, eta) + 1e-12
        for j in active_pieces(vmax, x):
            assert dmax >= piece_directional_derivative(vmax, j, x, eta) - 1e-12


def test_discontinuity_detection(sys3):
    bad = piecewise_quadratic(
        [fixtures.P1_EX3, (2.0 * np.array(fixtures.P2_EX3)).tolist()],
        fixtures.EX3_CLF["H"],
    )
    with pytest.raises(DiscontinuityError):
        value(bad, Z)


def test_smooth_polynomial_gradient_is_derived():
    v = smooth_polynomial([Monomial(1.0, (4, 0)), Monomial(2.0, (0, 2))])
    assert np.allclose(
        [g[0].coeff if g else 0.0 for g in v.gradient], [4.0, 4.0]
    )
    with pytest.raises(SchemaError):
        smooth_polynomial([Monomial(1.0, (0, 0))])


def test_rate_functions():
    w = quadratic_rate(2.0)
    assert rate_value(w, [1.0, 1.0]) == 4.0
    wp = polynomial_rate([(2.0, (0, 2))])
    assert rate_value(wp, [3.0, 2.0]) == 8.0
    assert rate_value(wp, np.zeros(2)) == 0.0
    with pytest.raises(SchemaError):
        polynomial_rate([(1.0, (0, 0))])
    with pytest.raises(ValueError):
        quadratic_rate(0.0)


def test_clf_roundtrip(v3, vq):
    for v in (v3, vq, pointwise_min([np.eye(2), 2 * np.eye(2)])):
        again = load_clf(json.dumps(dump_clf(v)))
        rng = np.random.default_rng(10)
        for _ in range(50):
            x = rng.standard_normal(2)
            assert value(again, x) == pytest.approx(value(v, x), rel=1e-14, abs=1e-14)


def test_load_clf_errors():
    with pytest.raises(SchemaError):
        load_clf(json.dumps({"kind": "mystery"}))
    with pytest.raises(SchemaError):
        load_clf(json.dumps({"kind": "piecewise_quadratic", "P": [[[1.0]]], "H": []}))
