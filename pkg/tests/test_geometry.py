from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewnerframes.errors import (
    CurveThroughOriginError,
    InvalidCurveError,
    NonUnivalentError,
    PoleInputError,
)
from loewnerframes.geometry import (
    SpherePoint,
    check_jordan,
    contains,
    curve_from_json,
    inverse_stereographic,
    inverse_stereographic_gradient_norm,
    inverse_stereographic_point,
    invert_curve,
    make_family,
    parse_curve_spec,
    self_intersections,
    stereographic,
    winding_number,
)

finite = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("z, expected", [(0, (0, 0, -1)), (1, (1, 0, 0)), (1j, (0, 1, 0))])
def test_inverse_stereographic_points(z, expected):
    assert np.allclose(inverse_stereographic_point(z), expected, atol=1e-15)


def test_gradient_norm_at_center():
    assert inverse_stereographic_gradient_norm(0) == pytest.approx(2 * math.sqrt(2), abs=1e-15)


def test_gradient_norm_matches_finite_difference():
    z, h = 0.3 - 0.7j, 1e-6
    jac = [(inverse_stereographic(z + d * h) - inverse_stereographic(z - d * h)) / (2 * h) for d in (1, 1j)]
    fd = math.sqrt(sum(float(np.sum(j**2)) for j in jac))
    assert fd == pytest.approx(float(inverse_stereographic_gradient_norm(z)), rel=1e-9)


@pytest.mark.parametrize("p, z", [((0, 0, -1), 0), ((1, 0, 0), 1)])
def test_stereographic_examples(p, z):
    assert stereographic(p) == pytest.approx(z, abs=1e-15)


def test_stereographic_rejects_north_pole():
    with pytest.raises(PoleInputError):
        stereographic((0.0, 0.0, 1.0))


def test_round_trip_random_batch():
    rng = np.random.default_rng(7)
    z = rng.normal(size=10_000) * 3 + 1j * rng.normal(size=10_000) * 3
    back = stereographic(inverse_stereographic(z))
    assert np.max(np.abs(back - z)) < 1e-13


@given(finite)
def test_inverse_stereographic_lands_on_sphere(z):
    p = inverse_stereographic(z)
    assert abs(float(np.dot(p, p)) - 1.0) < 1e-12


@given(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False))
def test_round_trip_property(z):
    assert abs(stereographic(inverse_stereographic(z)) - z) <= 1e-13 * max(1.0, abs(z)) ** 2


def test_circle_family_is_unit_circle():
    c = make_family("circle")
    t = c.parameters()
    assert np.allclose(c.points(t), np.exp(1j * t), atol=1e-15)
    assert c.positive and c.closed


def test_ellipse_samples_match_definition():
    c = make_family("ellipse", rho=0.2)
    t = c.parameters()
    assert np.allclose(c.points(t), np.exp(1j * t) + 0.2 * np.exp(-1j * t), atol=1e-15)


@pytest.mark.parametrize("rho", [1.0, 1.5, -0.1])
def test_ellipse_rejects_bad_rho(rho):
    with pytest.raises(InvalidCurveError):
        make_family("ellipse", rho=rho)


def test_cubic_image_passes_intersection_scan():
    c = make_family("power-series-image", n=1024, check_n=4096, coefficients=[0, 1, 0, 0.1])
    assert self_intersections(c.samples(4096)) == 0


def test_limacon_with_inner_loop_is_rejected():
    # fourier indexed -2..2: e^{it} + 0.6 e^{2it} has an inner loop
    with pytest.raises(InvalidCurveError):
        make_family("fourier-boundary", fourier=[0, 0, 0, 1, 0.6])
    ok = make_family("fourier-boundary", fourier=[0, 0, 0, 1, 0.3])
    assert self_intersections(ok.samples()) == 0


def test_nonunivalent_power_series_rejected():
    with pytest.raises(NonUnivalentError):
        make_family("power-series-image", coefficients=[0, 1, 0.5])


def test_inversion_examples():
    unit = invert_curve(make_family("circle"))
    assert np.allclose(np.abs(unit.samples()), 1.0, atol=1e-15)
    two = invert_curve(make_family("circle", radius=2.0))
    assert np.allclose(np.abs(two.samples()), 0.5, atol=1e-15)
    assert two.positive is False


def test_inversion_is_pointwise_reciprocal():
    c = make_family("ellipse", rho=0.2, shift=3.0)
    inv = invert_curve(c)
    t = c.parameters()
    assert np.allclose(inv.points(t), 1.0 / c.points(t), rtol=1e-15, atol=0)


def test_inversion_is_an_involution():
    c = make_family("ellipse", rho=0.3, shift=0.2 + 0.1j)
    back = invert_curve(invert_curve(c))
    assert np.max(np.abs(back.samples() - c.samples())) < 1e-13
    assert back.positive == c.positive


def test_inversion_rejects_curve_through_origin():
    with pytest.raises(CurveThroughOriginError):
        invert_curve(make_family("circle", shift=1.0))


def test_inverted_derivative_matches_finite_difference():
    c = invert_curve(make_family("ellipse", rho=0.2, shift=0.1))
    t, h = np.linspace(0, 6, 7), 1e-6
    fd = (c.points(t + h) - c.points(t - h)) / (2 * h)
    assert np.allclose(c.derivative(t), fd, atol=1e-8)


def test_winding_and_containment():
    c = make_family("ellipse", rho=0.2, shift=2.0)
    assert not contains(c, 0)
    assert contains(c, 2.0)
    assert winding_number(c.samples(), 2.0) == 1
    assert winding_number(invert_curve(make_family("circle")).samples(), 0) == -1


def test_spiral_arc_is_open():
    s = make_family("spiral-arc", eps=0.5)
    assert not s.closed
    t = s.parameters(16)
    assert np.all((t > 0) & (t < 0.5))
    assert np.allclose(s.points(t), t * np.exp(1j * np.log(np.log(t + 0j))))
    with pytest.raises(InvalidCurveError):
        invert_curve(s)


@pytest.mark.parametrize("spec, kind", [("circle", "circle"), ("circle:2", "circle"),
                                        ("ellipse:0.2", "ellipse"), ("ellipse:0.2@0.3,0.1", "ellipse"),
                                        ("poly:0,1,0,0.1", "power-series-image"), ("spiral:0.25", "spiral-arc")])
def test_parse_curve_spec(spec, kind):
    assert parse_curve_spec(spec).kind == kind


def test_parse_rejects_unknown():
    with pytest.raises(InvalidCurveError):
        parse_curve_spec("square:1")


@pytest.mark.parametrize("c", [make_family("circle", radius=1.5, center=0.2j),
                               make_family("ellipse", rho=0.2, shift=0.1 + 0.2j),
                               make_family("power-series-image", coefficients=[0, 1, 0, 0.1])])
def test_json_round_trip(c, tmp_path):
    path = tmp_path / "curve.json"
    path.write_text(json.dumps(c.to_json()))
    back = parse_curve_spec(f"file:{path}")
    assert np.allclose(back.samples(), c.samples(), atol=1e-15)


def test_json_round_trip_inverted():
    c = invert_curve(make_family("ellipse", rho=0.1, shift=0.2))
    back = curve_from_json(json.loads(json.dumps(c.to_json())))
    assert back.inverted and np.allclose(back.samples(), c.samples(), atol=1e-15)


def test_sample_count_must_be_power_of_two():
    with pytest.raises(InvalidCurveError):
        make_family("circle", n=1000)


def test_check_jordan_counts_crossings():
    t = 2 * np.pi * np.arange(512) / 512
    eight = np.sin(t) + 1j * np.sin(2 * t)
    assert self_intersections(eight) > 0
    check_jordan(make_family("circle"))


def test_sphere_point_array():
    p = SpherePoint(0.0, 0.0, 1.0)
    assert np.array_equal(p.as_array(), [0.0, 0.0, 1.0])
