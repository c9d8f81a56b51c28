from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loewnerframes.cli import RunConfig, epsilon_table
from loewnerframes.conformal import from_taylor, solve_exterior_via_inversion, solve_interior_map
from loewnerframes.energy import (
    FORMULA_FUNCS,
    FORMULAS,
    EnergyConfig,
    e0_spherical,
    formula_values,
    frame_energy_form,
    full_report,
    grunsky_residual,
    pairwise_residuals,
    recentre,
    s1,
    s1_inverted,
    s3,
    solve_pair,
)
from loewnerframes.errors import DegenerateMapError, InvalidCurveError, NonzeroCenterError
from loewnerframes.geometry import invert_curve, make_family

from .oracles import ELLIPSE_EXTERIOR, LOG2, LOG_AREA_2Z, PRESCHWARZIAN_POLY

IDENTITY = from_taylor([0, 1])
IDENTITY_EXT = from_taylor([0, 1], role="inverted-exterior")


def pair_for(kind, **params):
    c = make_family(kind, **params)
    c, _ = recentre(c)
    return solve_pair(c)


@pytest.fixture(scope="module")
def ellipse02():
    return pair_for("ellipse", rho=0.2)


@pytest.fixture(scope="module")
def quad005():
    return pair_for("power-series-image", coefficients=[0, 1, 0.05])


@pytest.mark.parametrize("name", FORMULAS)
def test_circle_is_zero(name):
    assert abs(FORMULA_FUNCS[name](IDENTITY, IDENTITY_EXT).value) < 1e-12


@pytest.mark.parametrize("r", [0.5, 2.0, 3.0])
def test_scaled_circle_is_zero(r):
    f, gt = from_taylor([0, r]), from_taylor([0, 1 / r], role="inverted-exterior")
    for name in FORMULAS:
        assert abs(FORMULA_FUNCS[name](f, gt).value) < 1e-11
    terms = s1(f, gt).terms
    assert terms["4pi_log_f1"] == pytest.approx(4 * math.pi * math.log(r))


@pytest.mark.parametrize("rho", sorted(ELLIPSE_EXTERIOR))
def test_ellipse_exterior_term(rho):
    f, gt = pair_for("ellipse", rho=rho)
    assert s1(f, gt).terms["ext_g"] == pytest.approx(ELLIPSE_EXTERIOR[rho], abs=1e-8)


@pytest.mark.parametrize("coeffs, key", [([0, 1, 0.05], (0.05, 2)), ([0, 1, 0, 0.1], (0.1, 3))])
def test_interior_term_matches_series_oracle(coeffs, key):
    f, gt = pair_for("power-series-image", coefficients=coeffs)
    assert s1(f, gt).terms["int_f"] == pytest.approx(PRESCHWARZIAN_POLY[key], abs=1e-9)


def test_log_area_term_matches_oracle():
    f, gt = from_taylor([0, 2]), from_taylor([0, 0.5], role="inverted-exterior")
    assert e0_spherical(f, gt).terms["green_1"] == pytest.approx(LOG_AREA_2Z, abs=1e-9)


def test_circle_hemisphere_breakdown():
    terms = e0_spherical(IDENTITY, IDENTITY_EXT).terms
    for tag in "12":
        assert terms[f"dirichlet_{tag}"] == pytest.approx(4 * math.pi * LOG2 - 2 * math.pi, abs=1e-10)
        assert terms[f"green_{tag}"] == pytest.approx(-4 * math.pi * LOG2, abs=1e-9)
        assert terms[f"area_{tag}"] == pytest.approx(2 * math.pi, abs=1e-12)
        hemi = sum(v for k, v in terms.items() if k.endswith("_" + tag))
        assert hemi == pytest.approx(6 * math.pi * LOG2, abs=1e-9)
    frame = frame_energy_form(IDENTITY, IDENTITY_EXT).terms
    assert frame["green_curvature_1"] == pytest.approx(-4 * math.pi * LOG2, abs=1e-9)


def test_sphere_area_sums_to_four_pi(ellipse02):
    terms = e0_spherical(*ellipse02).terms
    assert terms["area_1"] + terms["area_2"] == pytest.approx(4 * math.pi, abs=1e-8)


@pytest.mark.parametrize("fixture", ["ellipse02", "quad005"])
def test_cross_formula_agreement(fixture, request):
    f, gt = request.getfixturevalue(fixture)
    values = {k: v.value for k, v in formula_values(f, gt, grunsky=False)[0].items()}
    for a, b in pairwise_residuals(values).items():
        assert b < 1e-6, a


def test_cubic_s3_matches_s1():
    f, gt = pair_for("power-series-image", coefficients=[0, 1, 0, 0.1])
    assert s3(f, gt).value == pytest.approx(s1(f, gt).value, abs=1e-6)


@pytest.mark.parametrize("maps, tol", [((IDENTITY, IDENTITY_EXT), 1e-9)])
def test_grunsky_circle(maps, tol):
    assert abs(grunsky_residual(*maps).value) < tol


@pytest.mark.parametrize("fixture", ["ellipse02", "quad005"])
def test_grunsky_residual(fixture, request):
    assert abs(grunsky_residual(*request.getfixturevalue(fixture)).value) < 1e-6


def test_centered_formulas_need_zero_center():
    f = from_taylor([0.1, 1])
    for fn in (s1_inverted, grunsky_residual):
        with pytest.raises(NonzeroCenterError):
            fn(f, IDENTITY_EXT)
    s1(f, IDENTITY_EXT)


def test_s3_carries_its_center_constant():
    c = make_family("ellipse", rho=0.2)
    gt = solve_exterior_via_inversion(c)
    values = [s3(solve_interior_map(c, center=p), gt).value for p in (0, 0.3, -0.2 + 0.4j)]
    assert max(values) - min(values) < 1e-8


def test_exterior_map_must_fix_origin():
    with pytest.raises(NonzeroCenterError):
        s1(IDENTITY, from_taylor([0.1, 1], role="inverted-exterior"))


def test_degenerate_derivative():
    with pytest.raises(DegenerateMapError):
        s1(IDENTITY, from_taylor([0, 5e-13], role="inverted-exterior"))


@pytest.mark.parametrize("name", FORMULAS)
def test_bookkeeping_identity(name, ellipse02):
    r = FORMULA_FUNCS[name](*ellipse02)
    assert r.value == math.fsum(r.terms.values())


@settings(max_examples=8)
@given(st.floats(0, 2 * math.pi))
def test_rotation_invariance(alpha):
    f = from_taylor([0, 1, 0.05])
    gt = _QUAD_EXT
    for name in FORMULAS:
        a = FORMULA_FUNCS[name](f, gt)
        b = FORMULA_FUNCS[name](f.rotated(alpha), gt.rotated(-alpha))
        for k in a.terms:
            assert b.terms[k] == pytest.approx(a.terms[k], abs=1e-10), (name, k)


_QUAD_EXT = solve_exterior_via_inversion(make_family("power-series-image", coefficients=[0, 1, 0.05]))


def test_center_independence():
    c = make_family("ellipse", rho=0.2)
    gt = solve_exterior_via_inversion(c)
    values = [e0_spherical(solve_interior_map(c, center=p), gt).value for p in (0, 0.3, -0.2 + 0.4j)]
    assert max(values) - min(values) < 1e-5


def test_full_report_circle():
    rep = full_report(make_family("circle"))
    assert all(abs(v) < 1e-8 for v in rep.values.values())
    assert rep.max_residual < 1e-8
    assert rep.loewner_energy == pytest.approx(0.0, abs=1e-8)


def test_full_report_ellipse_and_mobius():
    c = make_family("ellipse", rho=0.2, shift=0.3 + 0.2j)
    rep = full_report(c, EnergyConfig(mobius=True))
    assert rep.max_residual < 1e-5
    assert rep.mobius["residual"] < 1e-5
    assert all(v >= 0 for v in rep.residuals.values())
    doc = json.loads(rep.dumps())
    assert doc["s1"] == rep.s1 and doc["metadata"]["panels"] == 8
    assert rep.to_csv().splitlines()[0].startswith("curve,")


def test_full_report_with_center():
    c = make_family("ellipse", rho=0.2)
    a = full_report(c, EnergyConfig(grunsky=False))
    b = full_report(c, EnergyConfig(grunsky=False), center=0.3 - 0.1j)
    assert a.s1 == pytest.approx(b.s1, abs=1e-8)
    with pytest.raises(InvalidCurveError):
        full_report(c, center=5.0)


def test_recentre_moves_origin_inside():
    moved, delta = recentre(make_family("circle", center=3 + 1j))
    assert abs(delta + (3 + 1j)) < 1e-12
    c, d = recentre(make_family("power-series-image", coefficients=[0.5, 1, 0.05]))
    assert d == -0.5


def test_inverted_curve_energy_matches():
    c = make_family("ellipse", rho=0.3, shift=0.1j)
    a = full_report(c, EnergyConfig(grunsky=False)).s1
    b = full_report(invert_curve(c), EnergyConfig(grunsky=False)).s1
    assert a == pytest.approx(b, abs=1e-5)


def test_smoothing_family_converges():
    rows = epsilon_table(make_family("power-series-image", coefficients=[0, 1, 0, 0.1]), RunConfig(curve="poly:0,1,0,0.1"))
    diffs = [r["difference"] for r in rows[1:]]
    assert all(b < a for a, b in zip(diffs, diffs[1:]))
    exact = s1(*pair_for("power-series-image", coefficients=[0, 1, 0, 0.1])).value
    errs = [abs(r["value"] - exact) for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
