import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radar_cbba.geometry import (
    Ellipse,
    GeometryError,
    PolarNoise,
    ellipse_area,
    ellipse_contains,
    intersection_area,
    measurement_covariance,
)

from oracles import lens_area, monte_carlo_intersection


def random_pair(rng):
    """Two random ellipses whose overlap is not a sliver."""
    while True:
        shapes = []
        for _ in range(2):
            a, b = rng.uniform(0.5, 3.0, 2)
            phi = rng.uniform(0, math.pi)
            r = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
            shapes.append(r @ np.diag([a * a, b * b]) @ r.T)
        c1 = rng.uniform(-1, 1, 2)
        c2 = c1 + rng.uniform(-2.5, 2.5, 2)
        e1 = Ellipse(tuple(c1), shapes[0], 1.0)
        e2 = Ellipse(tuple(c2), shapes[1], 1.0)
        if intersection_area(e1, e2) > 0.1 * min(e1.area, e2.area):
            return e1, e2


# -- measurement covariance ------------------------------------------------

@pytest.mark.parametrize(
    "theta, expected",
    [
        (0.0, [[4, 0], [0, 1]]),
        (math.pi / 2, [[1, 0], [0, 4]]),
        (math.pi / 4, [[2.5, -1.5], [-1.5, 2.5]]),
    ],
)
def test_measurement_covariance_examples(theta, expected):
    k = measurement_covariance(100.0, theta, PolarNoise(2.0, 0.01))
    assert np.allclose(k, expected, atol=1e-12)


def test_measurement_covariance_matches_matrix_product():
    theta, r = 0.7, 2500.0
    noise = PolarNoise(3.0, 1e-3)
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, s], [-s, c]])
    expected = rot @ np.diag([9.0, (r * 1e-3) ** 2]) @ rot.T
    assert np.allclose(measurement_covariance(r, theta, noise), expected)


@pytest.mark.parametrize("args", [(0.0, 1.0, 0.01), (-5.0, 1.0, 0.01)])
def test_measurement_covariance_rejects_bad_range(args):
    r, sr, st_ = args
    with pytest.raises(GeometryError):
        measurement_covariance(r, 0.0, PolarNoise(sr, st_))


@pytest.mark.parametrize("sr, st_", [(0.0, 0.01), (1.0, -0.01)])
def test_polar_noise_must_be_positive(sr, st_):
    with pytest.raises(GeometryError):
        PolarNoise(sr, st_)


# -- ellipses ----------------------------------------------------------------

@pytest.mark.parametrize(
    "shape, scale, area",
    [
        (np.diag([4.0, 1.0]), 1.0, 2 * math.pi),
        (np.eye(2), 3.0, 9 * math.pi),
        (np.array([[2.5, -1.5], [-1.5, 2.5]]), 1.0, 2 * math.pi),
    ],
)
def test_ellipse_area_examples(shape, scale, area):
    assert ellipse_area(Ellipse((0, 0), shape, scale)) == pytest.approx(area, rel=1e-12)


@pytest.mark.parametrize(
    "shape",
    [np.array([[1.0, 2.0], [2.0, 1.0]]), np.zeros((2, 2)), np.array([[1.0, 0.5], [0.4, 1.0]]), np.diag([1.0, 1e-14])],
)
def test_invalid_shapes_raise(shape):
    with pytest.raises(GeometryError):
        Ellipse((0, 0), shape)


def test_ellipse_json_roundtrip():
    e = Ellipse((1.5, -2.0), np.array([[2.5, -1.5], [-1.5, 2.5]]), 2.0)
    assert Ellipse.from_dict(e.to_dict()) == e


@pytest.mark.parametrize("p, inside", [((0, 0), True), ((1, 0), True), ((1.001, 0), False), ((0, -1), True)])
def test_contains(p, inside):
    assert ellipse_contains(Ellipse((0, 0), np.eye(2), 1.0), p) is inside


# -- intersection -------------------------------------------------------------

def test_identical_ellipses_give_their_area():
    e = Ellipse((3.0, 4.0), np.array([[2.5, -1.5], [-1.5, 2.5]]), 2.0)
    assert intersection_area(e, e) == pytest.approx(e.area, rel=1e-9)


def test_disjoint_is_zero():
    a = Ellipse((0, 0), np.eye(2), 1.0)
    b = Ellipse((1000, 0), np.eye(2), 1.0)
    assert intersection_area(a, b) == 0.0


def test_unit_circle_lens():
    a = Ellipse((0, 0), np.eye(2), 1.0)
    b = Ellipse((1, 0), np.eye(2), 1.0)
    expected = 2 * math.acos(0.5) - 0.5 * math.sqrt(3)
    assert expected == pytest.approx(1.22837, abs=1e-5)
    assert intersection_area(a, b) == pytest.approx(expected, rel=5e-3)


@pytest.mark.parametrize("d", [0.1, 0.5, 1.0, 1.5, 1.9, 2.5])
@pytest.mark.parametrize("r2", [0.5, 1.0, 2.0])
def test_circle_pairs_against_lens_formula(d, r2):
    a = Ellipse((0, 0), np.eye(2), 1.0)
    b = Ellipse((d, 0), np.eye(2) * r2 * r2, 1.0)
    expected = lens_area(1.0, r2, d)
    got = intersection_area(a, b)
    if expected == 0:
        assert got == 0
    elif expected > 0.2 * math.pi * min(1.0, r2) ** 2:
        assert got == pytest.approx(expected, rel=5e-3)
    else:
        # thin slivers carry a larger relative discretization error
        assert got == pytest.approx(expected, rel=3e-2)


def test_monte_carlo_agreement():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a, b = random_pair(rng)
        mc = monte_carlo_intersection(a.center, a.shape_matrix, b.center, b.shape_matrix, 1.0, 10**6, rng)
        assert intersection_area(a, b) == pytest.approx(mc, rel=0.02)


def test_nested_gives_inner_area():
    outer = Ellipse((0, 0), np.diag([9.0, 4.0]), 1.0)
    inner = Ellipse((0.2, 0.1), np.diag([0.5, 0.2]), 1.0)
    assert intersection_area(outer, inner) == pytest.approx(inner.area, rel=1e-9)


finite = st.floats(-5, 5, allow_nan=False)
axis = st.floats(0.2, 4.0)
angle = st.floats(0, math.pi)


def make(cx, cy, a, b, phi, scale=1.0):
    r = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    return Ellipse((cx, cy), r @ np.diag([a * a, b * b]) @ r.T, scale)


@settings(max_examples=150, deadline=None)
@given(finite, finite, axis, axis, angle, finite, finite, axis, axis, angle)
def test_intersection_properties(x1, y1, a1, b1, p1, x2, y2, a2, b2, p2):
    e1 = make(x1, y1, a1, b1, p1)
    e2 = make(x2, y2, a2, b2, p2)
    v = intersection_area(e1, e2)
    assert v >= 0
    assert v == intersection_area(e2, e1)
    assert v <= min(e1.area, e2.area) * (1 + 1e-9)


@settings(max_examples=60, deadline=None)
@given(finite, finite, axis, axis, angle, finite, finite, axis, axis, angle, st.floats(0, 2 * math.pi))
def test_rotation_invariance(x1, y1, a1, b1, p1, x2, y2, a2, b2, p2, rot):
    c, s = math.cos(rot), math.sin(rot)

    def turn(x, y):
        return c * x - s * y, s * x + c * y

    before = intersection_area(make(x1, y1, a1, b1, p1), make(x2, y2, a2, b2, p2))
    after = intersection_area(make(*turn(x1, y1), a1, b1, p1 + rot), make(*turn(x2, y2), a2, b2, p2 + rot))
    assert after == pytest.approx(before, rel=1e-6, abs=1e-9)
