from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from loewnerframes.conformal import BoundaryFunction, from_taylor, solve_interior_map
from loewnerframes.errors import NonFiniteSampleError
from loewnerframes.frames import geodesic_curvature_disk
from loewnerframes.geometry import make_family
from loewnerframes.quadrature import (
    default_rule,
    disk_rule,
    integrate_disk,
    integrate_exterior,
    integrate_log_weighted,
    panel_breakpoints,
    sobolev_seminorm,
)

from .oracles import EQ7, LOG2, OPTIMAL2, PRESCHWARZIAN_POLY, ELLIPSE_EXTERIOR

RULE = default_rule()


def sphere(z):
    return 4.0 / (1.0 + np.abs(z) ** 2) ** 2


def test_rule_invariants():
    assert math.fsum(RULE.weights.tolist()) == pytest.approx(math.pi, abs=1e-12)
    r = np.abs(RULE.nodes)
    assert np.all((r > 0) & (r < 1))
    assert np.all((np.abs(RULE.log_nodes) > 0) & (np.abs(RULE.log_nodes) < 1))
    assert RULE.params == {"panels": 8, "gauss": 16, "angles": 512, "log_levels": 16}


def test_breakpoints_are_dyadic_toward_both_ends():
    assert np.allclose(panel_breakpoints(8), [0, 1 / 16, 1 / 8, 1 / 4, 1 / 2, 3 / 4, 7 / 8, 15 / 16, 1])


@pytest.mark.parametrize("counts", [(0, 4, 4), (4, 0, 4), (4, 4, 0)])
def test_rule_rejects_zero_counts(counts):
    with pytest.raises(ValueError):
        disk_rule(*counts)


@pytest.mark.parametrize("F, expected, tol", [
    (1.0, math.pi, 1e-12),
    (sphere, 2 * math.pi, 1e-12),
    (lambda z: np.abs(z) ** 2 * sphere(z), EQ7, 1e-10),
])
def test_integrate_disk_examples(F, expected, tol):
    assert integrate_disk(F) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("k", range(1, 6))
def test_monomials(k):
    assert integrate_disk(lambda z: np.abs(z) ** (2 * k)) == pytest.approx(math.pi / (k + 1), abs=1e-12)


@pytest.mark.parametrize("j, k", [(0, 0), (1, 1), (3, 3), (7, 7), (2, 0), (5, 2), (0, 9), (12, 12), (15, 16)])
def test_exactness_on_monomials(j, k):
    value = integrate_disk(lambda z: z**j * np.conj(z) ** k)
    expected = math.pi / (j + 1) if j == k else 0.0
    assert value == pytest.approx(expected, abs=1e-12)


def test_preschwarzian_of_quadratic_matches_oracle_and_refined_rule():
    f = from_taylor([0, 1, 0.05])

    def F(z):
        _, d1, d2 = f.eval(z, r_max=1.0)
        return np.abs(d2 / d1) ** 2

    base = integrate_disk(F)
    assert base == pytest.approx(integrate_disk(F, RULE.refined(4)), abs=1e-9)
    assert base == pytest.approx(PRESCHWARZIAN_POLY[(0.05, 2)], abs=1e-9)


@pytest.mark.parametrize("F, expected", [
    (sphere, OPTIMAL2),
    (1.0, -math.pi / 2),
    (lambda z: 2 * sphere(z), 2 * OPTIMAL2),
])
def test_log_weighted_examples(F, expected):
    assert integrate_log_weighted(F) == pytest.approx(expected, abs=1e-9)


def test_exterior_examples():
    assert integrate_exterior(lambda z: np.abs(z) ** -6) == pytest.approx(math.pi / 2, abs=1e-12)
    val = integrate_exterior(lambda z: np.log(np.abs(z)) * sphere(z), log_refined=True)
    assert val == pytest.approx(2 * math.pi * LOG2, abs=1e-9)


@pytest.mark.parametrize("rho", sorted(ELLIPSE_EXTERIOR))
def test_exterior_joukowski_preschwarzian(rho):
    def F(z):
        d1 = 1 - rho / z**2
        d2 = 2 * rho / z**3
        return np.abs(d2 / d1) ** 2

    val = integrate_exterior(F)
    assert val == pytest.approx(ELLIPSE_EXTERIOR[rho], abs=1e-8)
    assert val == pytest.approx(-2 * math.pi * math.log(1 - rho**2), abs=1e-8)


@pytest.mark.parametrize("seed", range(20))
def test_exterior_matches_closed_form_on_random_rationals(seed):
    rng = np.random.default_rng(seed)
    a, c1, c2 = rng.uniform(0.1, 4.0), rng.normal(), rng.normal()
    m = int(rng.integers(3, 7))

    def F(z):
        s = np.abs(z) ** 2
        return c1 / (s + a) ** 3 + c2 * s**-m

    # int_1^inf 2 pi r (r^2+a)^-3 dr = pi / (2 (1+a)^2); int_1^inf 2 pi r^(1-2m) dr = pi/(m-1)
    closed = c1 * math.pi / (2 * (1 + a) ** 2) + c2 * math.pi / (m - 1)
    pulled_back = integrate_disk(lambda w: F(1 / w) / np.abs(w) ** 4)
    assert integrate_exterior(F) == pytest.approx(closed, abs=1e-10)
    assert integrate_exterior(F) == pytest.approx(pulled_back, abs=1e-10)


def test_determinism_bit_identical():
    F = lambda z: np.abs(1 + z + 0.3 * z**2) ** 2  # noqa: E731
    values = {integrate_disk(F) for _ in range(3)}
    values.add(integrate_disk(F(RULE.nodes)))
    assert len(values) == 1


def test_precomputed_values_are_accepted():
    assert integrate_disk(np.ones(RULE.nodes.size)) == pytest.approx(math.pi, abs=1e-12)


def test_non_finite_sample_names_node():
    with pytest.raises(NonFiniteSampleError) as info, np.errstate(all="ignore"):
        integrate_disk(lambda z: 1.0 / (z - RULE.nodes[5]))
    assert info.value.node == pytest.approx(complex(RULE.nodes[5]))


@given(st.floats(0.0, 0.9), st.floats(0.0, 2 * math.pi))
def test_rotation_invariance_of_radial_integrals(r0, alpha):
    F = lambda z: 1.0 / (1.0 + np.abs(z - r0) ** 2)  # noqa: E731
    G = lambda z: F(z * np.exp(1j * alpha))  # noqa: E731
    assert integrate_disk(F) == pytest.approx(integrate_disk(G), abs=1e-10)


@pytest.mark.parametrize("s", [-0.5, 0.5])
def test_sobolev_constant_is_zero(s):
    assert sobolev_seminorm(np.full(64, 3.0 + 0j), s) == 0.0


def test_sobolev_single_mode():
    t = 2 * np.pi * np.arange(64) / 64
    assert sobolev_seminorm(np.exp(1j * t), 0.5) == pytest.approx(1.0, abs=1e-14)
    assert sobolev_seminorm(BoundaryFunction.from_samples(np.exp(3j * t)), -0.5) == pytest.approx(1 / 3)


def test_sobolev_rejects_other_orders():
    with pytest.raises(ValueError):
        sobolev_seminorm(np.ones(8), 1.0)


def test_sobolev_of_ellipse_curvature_is_resolution_stable():
    f = solve_interior_map(make_family("ellipse", rho=0.2))
    a = geodesic_curvature_disk(f, n_theta=1024).sobolev_minus_half
    b = geodesic_curvature_disk(f, n_theta=2048).sobolev_minus_half
    assert np.isfinite(a) and a > 0
    assert a == pytest.approx(b, rel=1e-6)
