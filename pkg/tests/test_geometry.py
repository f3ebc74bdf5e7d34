import numpy as np
import pytest

from hopflike.geometry import (
    GeometryError,
    classify_boundary_point,
    find_pseudo_equilibria,
    find_regular_equilibria,
    sliding_field,
    sliding_velocity,
    sliding_weight,
)
from hopflike.model import PointTag
from hopflike.pwsmodel import Filippov, PWSystem
from hopflike.zoo import zoo_build

from .conftest import piece, reversed_system


@pytest.mark.parametrize(
    "y, tag",
    [
        (0.5, PointTag.CROSSING),
        (-0.5, PointTag.ATTRACTING_SLIDING),
        (0.0, PointTag.INVISIBLE_FOLD_R),
    ],
)
def test_classify_boundary_point(sliding_system, y, tag):
    result = classify_boundary_point(sliding_system, y)
    assert result.tag == tag
    assert result.f_left == 1.0
    assert result.f_right == y


def test_fold_visibility(sliding_system):
    result = classify_boundary_point(sliding_system, 0.0)
    assert result.visible_right is False
    assert result.visible_left is None


def test_repelling_sliding():
    sys = PWSystem(
        name="repelling",
        mechanism=Filippov(left=piece("left", [(-1.0, 0, 0)], []), right=piece("right", [(1.0, 0, 0)], [])),
    )
    assert classify_boundary_point(sys, 0.3).tag == PointTag.REPELLING_SLIDING


def test_sliding_quantities(sliding_system):
    assert sliding_weight(sliding_system, -1.0) == 0.5
    assert sliding_velocity(sliding_system, -1.0) == pytest.approx((0.0, -0.5))
    assert sliding_field(sliding_system, -1.0) == pytest.approx(-0.5)


def test_sliding_weight_undefined():
    sys = PWSystem(
        name="equal",
        mechanism=Filippov(left=piece("left", [(1.0, 0, 0)], []), right=piece("right", [(1.0, 0, 0)], [])),
    )
    with pytest.raises(GeometryError):
        sliding_weight(sys, 0.0)


@pytest.mark.parametrize("name", ["mckean", "ocean", "valve", "slip_focus_focus", "pendulum", "bilinear"])
def test_sliding_vector_stays_on_the_manifold(name):
    sys = zoo_build(name)
    rng = np.random.default_rng(7)
    for y in rng.uniform(-1.0, 1.0, 2000):
        point = classify_boundary_point(sys, float(y))
        if point.tag not in (PointTag.ATTRACTING_SLIDING, PointTag.REPELLING_SLIDING):
            continue
        s = sliding_weight(sys, float(y))
        assert 0.0 <= s <= 1.0
        vx, _ = sliding_velocity(sys, float(y))
        assert vx == pytest.approx(0.0, abs=1e-12 * (1 + abs(point.f_left) + abs(point.f_right)))


def test_pseudo_equilibrium(pseudo_system):
    found = find_pseudo_equilibria(pseudo_system, (-1.0, 0.9))
    assert len(found) == 1
    eq = found[0]
    assert eq.kind == "pseudo"
    assert eq.y == pytest.approx(0.0, abs=1e-12)
    assert eq.admissible
    assert eq.stable


def test_virtual_pseudo_equilibrium():
    # both pieces point right: the zero of the sliding field is not on a sliding region
    sys = PWSystem(
        name="virtual",
        mechanism=Filippov(
            left=piece("left", [(1.0, 0, 0)], [(-1.0, 0, 1)]),
            right=piece("right", [(2.0, 0, 0)], [(-1.0, 0, 1)]),
        ),
    )
    found = find_pseudo_equilibria(sys, (-1.0, 0.9))
    assert len(found) == 1
    assert not found[0].admissible


def test_regular_equilibria():
    sys = PWSystem(
        name="regular",
        mechanism=Filippov(
            left=piece("left", [(1.0, 0, 1)], [(-1.0, 1, 0), (-1.0, 0, 0), (-1.0, 0, 1)]),
            right=piece("right", [(1.0, 0, 1)], [(-1.0, 1, 0), (-1.0, 0, 0), (-1.0, 0, 1)]),
        ),
    )
    found = find_regular_equilibria(sys, (-2.0, 2.0, -1.0, 1.0))
    by_kind = {eq.kind: eq for eq in found}
    assert set(by_kind) == {"regular_L", "regular_R"}
    assert by_kind["regular_L"].x == pytest.approx(-1.0)
    assert by_kind["regular_L"].admissible
    assert by_kind["regular_L"].stable
    assert not by_kind["regular_R"].admissible


def test_regular_equilibria_of_smooth_system(harmonic):
    found = find_regular_equilibria(harmonic, (-1.0, 1.0, -1.0, 1.0))
    assert len(found) == 1
    assert found[0].kind == "regular"
    assert found[0].eigen.kind == "focus"
    assert not found[0].hyperbolic


def test_geometry_needs_two_pieces(harmonic):
    with pytest.raises(GeometryError):
        classify_boundary_point(harmonic, 0.0)
    with pytest.raises(GeometryError):
        find_pseudo_equilibria(harmonic, (-1.0, 1.0))


@pytest.mark.parametrize(
    "name", ["mckean", "gause", "slip_focus_focus", "slip_focus_fold", "pendulum", "fixed_two_fold"]
)
def test_time_reversal_swaps_sliding_kinds(name):
    sys = zoo_build(name)
    backward = reversed_system(sys)
    swapped = {
        PointTag.ATTRACTING_SLIDING: PointTag.REPELLING_SLIDING,
        PointTag.REPELLING_SLIDING: PointTag.ATTRACTING_SLIDING,
    }
    for y in np.linspace(-1.0, 1.0, 101):
        forward = classify_boundary_point(sys, float(y), 0.05)
        reverse = classify_boundary_point(backward, float(y), 0.05)
        assert reverse.tag == swapped.get(forward.tag, forward.tag)
        assert reverse.f_left == -forward.f_left
        assert reverse.f_right == -forward.f_right
        assert reverse.visible_left == forward.visible_left
        assert reverse.visible_right == forward.visible_right
