import json

import numpy as np
import pytest

from switchstab import fixtures
from switchstab.clf import PieceInactiveError, active_pieces, load_clf
from switchstab.model import eval_field, load_system
from switchstab.switchlaw import (
    DegenerateDirectionError,
    SlidingSurface,
    SwitchingLaw,
    TangencyError,
    boundary_limit_modes,
    candidate_surfaces,
    is_regular,
    linear_fn,
    load_region_law,
    sliding_candidate_modes,
    sliding_coefficients,
)

Z = np.array([1.0, 1.0])


@pytest.fixture
def law3():
    sys3 = load_system(json.dumps(fixtures.EX3_SYSTEM))
    return SwitchingLaw(sys3, load_clf(json.dumps(fixtures.EX3_CLF)))


@pytest.fixture
def law1():
    sys1 = load_system(json.dumps(fixtures.EX1_SYSTEM))
    return load_region_law(fixtures.EX1_REGION_LAW, sys1)


@pytest.fixture
def law2():
    sys2 = load_system(json.dumps(fixtures.EX2_SYSTEM))
    return load_region_law(fixtures.EX2_REGION_LAW, sys2)


@pytest.fixture
def lawn():
    sysn = load_system(json.dumps(fixtures.NONLINEAR_SYSTEM))
    return SwitchingLaw(sysn, load_clf(json.dumps(fixtures.NONLINEAR_CLF)))


def test_nu_on_nonsmooth_boundary(law3):
    # the per-piece minimizer sets are {1} and {2}; the least index wins
    assert law3.minimizer_sets(Z) == {1: {1}, 2: {2}}
    assert law3.mode(Z) == 1


def test_nu_nonlinear_interior(lawn):
    assert lawn.mode([1.0, 0.0]) == 1
    assert lawn.mode([0.0, 1.0]) == 2  # DV2 = -6 x2^2 < 2 x2^2 = DV1


def test_nu_at_origin(law3, lawn):
    assert law3.mode(np.zeros(2)) == 1
    assert lawn.mode(np.zeros(2)) == 1


def test_sliding_candidate_modes(law3, law1):
    assert sliding_candidate_modes(law3, Z) == {1, 2}
    # interior point of a single decision region
    assert sliding_candidate_modes(law3, [1.0, 0.2]) == {1}
    # explicit region law: both half-plane modes are adjacent to x1 = 0
    assert sliding_candidate_modes(law1, [0.0, 1.0]) == {1, 2}
    assert sliding_candidate_modes(law1, [1.0, 1.0]) == {1}


def test_boundary_limit_modes_reference_values(law3):
    assert boundary_limit_modes(law3, 1, Z) == {1}
    assert boundary_limit_modes(law3, 2, Z) == {2}
    with pytest.raises(PieceInactiveError):
        boundary_limit_modes(law3, 2, [1.0, 0.0])


def test_boundary_limit_modes_interior(law3):
    x = np.array([1.0, 0.2])
    assert boundary_limit_modes(law3, 1, x) == {law3.mode(x)}


class _ThreeRegionLaw:
    """Piece 1 left of x1=0 (mode 1); piece 2 right, split by x2=0 into
    modes 2 (top) and 3 (bottom).  Mirrors the two-piece/three-region
    geometry used to illustrate the boundary limit sets."""

    dimension = 2

    def mode(self, x):
        if x[0] < 0.0:
            return 1
        if x[0] == 0.0:
            return 1
        return 2 if x[1] > 0.0 else 3

    def tie_set(self, x):
        return {self.mode(x)}

    def pieces(self, x):
        if x[0] < 0.0:
            return {1}
        if x[0] == 0.0:
            return {1, 2}
        return {2}

    probe_radius_factor = 1.0
    probe_count = 64


def test_boundary_limit_modes_three_regions():
    law = _ThreeRegionLaw()
    meeting = np.array([0.0, 0.0])  # where the mode split meets the piece boundary
    assert boundary_limit_modes(law, 1, meeting) == {1}
    assert boundary_limit_modes(law, 2, meeting) == {2, 3}
    away = np.array([0.0, -1.0])  # piece boundary away from the mode split
    assert boundary_limit_modes(law, 1, away) == {1}
    assert boundary_limit_modes(law, 2, away) == {3}


def test_union_property(law3):
    # union over active pieces of M_j equals I_sm on boundary points
    for t in np.linspace(0.2, 2.0, 25):
        x = np.array([t, t])
        union = set()
        for j in law3.pieces(x):
            union |= boundary_limit_modes(law3, j, x)
        assert union == sliding_candidate_modes(law3, x)


def test_is_regular_examples(law1, law2):
    # attractive upper half of x1 = 0 for the half-plane law
    assert is_regular(law1, [0.0, 1.0], [(1, 0.5), (2, 0.5)])
    # nonattractive surface x1 = 0 for the quadrant law
    assert not is_regular(law2, [0.0, 1.0], [(1, 0.5), (2, 0.5)])
    # attractive surface x2 = 0 for the quadrant law
    assert is_regular(law2, [1.0, 0.0], [(1, 0.5), (2, 0.5)])
    # interior point, single-mode weights: vacuously regular
    assert is_regular(law1, [1.0, 1.0], [(1, 1.0)])


def test_is_regular_degenerate_direction(law1):
    with pytest.raises(DegenerateDirectionError):
        is_regular(law1, np.zeros(2), [(1, 1.0)])


def test_sliding_coefficients_ex1(law1):
    surf = SlidingSurface(fn=linear_fn([1.0, 0.0]))
    res = sliding_coefficients(surf, law1.system, [0.0, 1.0], law=law1)
    assert res.alpha == pytest.approx(0.5, abs=1e-12)
    assert res.attractive and not res.crossing
    assert res.modes == (2, 1)  # mode 2 rules x1 < 0
    assert np.allclose(res.velocity, [0.0, 2.0])


def test_sliding_coefficients_ex2(law2):
    surf = SlidingSurface(fn=linear_fn([0.0, 1.0]))
    res = sliding_coefficients(surf, law2.system, [1.0, 0.0], law=law2)
    assert res.alpha == pytest.approx(0.5, abs=1e-12)
    assert res.attractive
    assert np.allclose(res.velocity, [-3.0, 0.0])
    # the nonattractive surface x1 = 0
    surf1 = SlidingSurface(fn=linear_fn([1.0, 0.0]))
    res1 = sliding_coefficients(surf1, law2.system, [0.0, 1.0], law=law2)
    assert res1.alpha == pytest.approx(0.5, abs=1e-12)
    assert not res1.attractive


def test_sliding_coefficients_antisymmetric_fields():
    from switchstab.model import SwitchedSystem, linear_field

    a = np.array([[0.0, 0.0], [1.0, 0.0]])  # f(1,0) = (0,1)
    sys = SwitchedSystem(dimension=2, subsystems=(linear_field(a), linear_field(-a)))
    surf = SlidingSurface(fn=linear_fn([0.0, 1.0]), side_modes=(1, 2))
    res = sliding_coefficients(surf, sys, [1.0, 0.0])
    assert res.alpha == pytest.approx(0.5, abs=1e-15)


def test_sliding_coefficients_tangency():
    from switchstab.model import SwitchedSystem, linear_field

    a = np.array([[-1.0, 0.0], [0.0, -1.0]])
    sys = SwitchedSystem(dimension=2, subsystems=(linear_field(a), linear_field(a)))
    surf = SlidingSurface(fn=linear_fn([0.0, 1.0]), side_modes=(1, 2))
    with pytest.raises(TangencyError):
        sliding_coefficients(surf, sys, [1.0, 0.0])


def test_sliding_residual_property(law1, law2):
    # the returned combination is tangential: <n, velocity> ~ 0
    rng = np.random.default_rng(11)
    surf = SlidingSurface(fn=linear_fn([1.0, 0.0]))
    for _ in range(100):
        x2 = rng.uniform(0.2, 5.0)
        res = sliding_coefficients(surf, law1.system, [0.0, x2], law=law1)
        fmax = max(
            np.linalg.norm(eval_field(law1.system, i, [0.0, x2])) for i in (1, 2)
        )
        assert abs(res.normal @ res.velocity) <= 1e-10 * (1 + x2) * fmax


def test_nu_scale_invariance(law3):
    rng = np.random.default_rng(12)
    for _ in range(10_000):
        x = rng.standard_normal(2)
        lam = rng.uniform(0.05, 50.0)
        assert law3.mode(x) == law3.mode(lam * x)


def test_lemma2_interior_equality(law3):
    # off the nonsmooth surface the law's score equals the one-sided minimum
    from switchstab.clf import directional_derivative

    rng = np.random.default_rng(13)
    checked = 0
    while checked < 2000:
        x = rng.uniform(-3, 3, 2)
        if len(active_pieces(law3.clf, x)) != 1:
            continue
        checked += 1
        scores = law3.selection_scores(x)
        dvs = [
            directional_derivative(law3.clf, x, eval_field(law3.system, i, x))
            for i in range(1, 5)
        ]
        assert scores[law3.mode(x) - 1] == pytest.approx(min(dvs), abs=1e-10)


def test_candidate_surfaces_ex3(law3):
    surfaces = candidate_surfaces(law3)
    # piece boundary x'(P1 - P2)x = 0 is present
    b = np.array(fixtures.P1_EX3) - np.array(fixtures.P2_EX3)
    found = any(
        s.fn.kind == "quadratic" and np.allclose(s.fn.S, b) for s in surfaces
    )
    assert found
    # every surface vanishes at the origin
    for s in surfaces:
        assert s.fn.value(np.zeros(2)) == 0.0


def test_candidate_surfaces_region_law(law2):
    surfaces = candidate_surfaces(law2)
    assert len(surfaces) == 1
    s = surfaces[0]
    assert s.side_modes == (1, 2)
    # r2 - r1 = 2 x1 x2: negative exactly on mode 1's quadrants
    assert s.fn.value(np.array([1.0, -1.0])) < 0
    assert s.fn.value(np.array([1.0, 1.0])) > 0


def test_candidate_surfaces_polynomial(lawn):
    surfaces = candidate_surfaces(lawn)
    assert len(surfaces) == 1
    s = surfaces[0]
    # <grad V, f1 - f2> = -8 x1^4 + 8 x2^2
    for x in ([1.0, 0.0], [0.5, 0.25], [1.0, 1.0]):
        x = np.array(x)
        want = -8.0 * x[0] ** 4 + 8.0 * x[1] ** 2
        assert s.fn.value(x) == pytest.approx(want, abs=1e-12)
