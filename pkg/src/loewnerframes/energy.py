"""Loewner energy of a Jordan curve by five independent formulas.

Every formula returns ``pi * I^L`` together with its named terms; the value
is the correctly rounded sum of those terms.  Notation: ``f`` is the
interior map, ``gt`` the interior map of the inverted curve, and
``g(z) = 1/gt(1/z)`` the exterior map.  With ``w = 1/z``,

    A = gt''/gt',   B0 = gt'/gt - 1/w = q'/q  (q = gt/w),

and the exterior integrands reduce to

    g''/g'                               = -w^2 (A - 2 B0),
    g''/g' - 2 g'/g + 2/z                = -w^2 A,
    g''/g' - 2 g' conj g/(1+|g|^2) + 2/z = -w^2 (A - 2 gt' conj gt/(1+|gt|^2)),
    4|g'|^2/(1+|g|^2)^2                  = |w|^4 4|gt'|^2/(1+|gt|^2)^2,

so no cancellation occurs near ``z = infinity``.  Exterior integrals are
taken with :func:`~loewnerframes.quadrature.integrate_exterior`.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .conformal import (
    AnalyticDiskMap,
    exterior_derivative_modulus,
    from_taylor,
    solve_exterior_via_inversion,
    solve_interior_map,
)
from .errors import DegenerateMapError, InvalidCurveError, NonzeroCenterError
from .frames import frame_fields, modified_preschwarzian, mu_of
from .geometry import ParametricCurve, centroid, contains, invert_curve
from .quadrature import (
    DiskQuadrature,
    default_rule,
    disk_rule,
    integrate_disk,
    integrate_exterior,
    integrate_log_weighted,
)

# quadrature nodes lie strictly inside the disk; allow them all
_R = 1.0
FOUR_PI = 4.0 * math.pi
LOG2 = math.log(2.0)
FORMULAS = ("s1", "s1_inverted", "s3", "e0_spherical", "frame_energy_form")


@dataclass(frozen=True)
class FormulaValue:
    """A formula value with its named terms (value = fsum of the terms)."""

    name: str
    terms: dict

    @property
    def value(self) -> float:
        return math.fsum(self.terms.values())


def _check_maps(f: AnalyticDiskMap, gt: AnalyticDiskMap, centered: bool):
    for m, label in ((f, "f'(0)"), (gt, "gt'(0)")):
        if abs(m.derivative_at_zero) < 1e-12:
            raise DegenerateMapError(f"|{label}| below 1e-12")
    if abs(gt.center) > 1e-14:
        raise NonzeroCenterError("the inverted exterior map must fix 0")
    if centered and abs(f.center) > 1e-14:
        raise NonzeroCenterError("this formula needs f(0) = 0; recentre the curve")


def _ext_maps(gt: AnalyticDiskMap, z):
    """Values at ``w = 1/z``: ``w, gt, gt', A, B0``."""
    w = 1.0 / z
    G, G1, G2 = gt.eval(w, 2, _R)
    q, dq = gt.quotient(w, _R)
    return w, G, G1, G2 / G1, dq / q


def _density(h, h1):
    return 4.0 * np.abs(h1) ** 2 / (1.0 + np.abs(h) ** 2) ** 2


def _constants(f: AnalyticDiskMap, gt: AnalyticDiskMap) -> dict:
    return {
        "4pi_log_f1": FOUR_PI * math.log(abs(f.derivative_at_zero)),
        "-4pi_log_g_inf": -FOUR_PI * math.log(exterior_derivative_modulus(gt)),
    }


def s1(f: AnalyticDiskMap, gt: AnalyticDiskMap, rule: DiskQuadrature | None = None) -> FormulaValue:
    """``int_D |f''/f'|^2 + int_ext |g''/g'|^2 + 4 pi log|f'(0)| - 4 pi log|g'(inf)|``."""
    rule = rule or default_rule()
    _check_maps(f, gt, centered=False)

    def interior(z):
        _, f1, f2 = f.eval(z, 2, _R)
        return np.abs(f2 / f1) ** 2

    def exterior(z):
        w, _, _, A, B0 = _ext_maps(gt, z)
        return np.abs(-(w**2) * (A - 2.0 * B0)) ** 2

    terms = {"int_f": integrate_disk(interior, rule), "ext_g": integrate_exterior(exterior, rule)}
    terms.update(_constants(f, gt))
    return FormulaValue("s1", terms)


def s1_inverted(f: AnalyticDiskMap, gt: AnalyticDiskMap, rule: DiskQuadrature | None = None) -> FormulaValue:
    """Form built from ``f''/f' - 2f'/f + 2/z`` and its exterior counterpart (needs ``f(0) = 0``)."""
    rule = rule or default_rule()
    _check_maps(f, gt, centered=True)

    def interior(z):
        _, f1, f2 = f.eval(z, 2, _R)
        q, dq = f.quotient(z, _R)
        return np.abs(f2 / f1 - 2.0 * dq / q) ** 2

    def exterior(z):
        w, _, _, A, _ = _ext_maps(gt, z)
        return np.abs(-(w**2) * A) ** 2

    terms = {"int_f": integrate_disk(interior, rule), "ext_g": integrate_exterior(exterior, rule)}
    terms.update(_constants(f, gt))
    return FormulaValue("s1_inverted", terms)


def s3(f: AnalyticDiskMap, gt: AnalyticDiskMap, rule: DiskQuadrature | None = None) -> FormulaValue:
    """Spherical form: modified pre-Schwarzians, log-weighted areas and constants."""
    rule = rule or default_rule()
    _check_maps(f, gt, centered=False)

    def interior(z):
        return np.abs(modified_preschwarzian(*f.eval(z, 2, _R))) ** 2

    def exterior(z):
        w, G, G1, A, _ = _ext_maps(gt, z)
        return np.abs(-(w**2) * (A - 2.0 * G1 * np.conj(G) / (1.0 + np.abs(G) ** 2))) ** 2

    def area_f(z):
        h, h1 = f.eval(z, 1, _R)
        return 2.0 * _density(h, h1)

    def area_g_log(z):
        w, G, G1, _, _ = _ext_maps(gt, z)
        return 2.0 * np.log(np.abs(z)) * np.abs(w) ** 4 * _density(G, G1)

    terms = {
        "int_f": integrate_disk(interior, rule),
        "ext_g": integrate_exterior(exterior, rule),
        "log_area_f": integrate_log_weighted(area_f, rule),
        "-log_area_g": -integrate_exterior(area_g_log, rule, log_refined=True),
        "4pi": FOUR_PI,
    }
    terms.update(_constants(f, gt))
    terms["-4pi_log_1+|f0|^2"] = -FOUR_PI * math.log1p(abs(f.center) ** 2)
    return FormulaValue("s3", terms)


def _hemisphere_terms(h: AnalyticDiskMap, rule: DiskQuadrature, tag: str) -> dict:
    def grad_log(z):
        return np.abs(modified_preschwarzian(*h.eval(z, 2, _R))) ** 2

    def grad2(z):
        v, v1 = h.eval(z, 1, _R)
        return 2.0 * _density(v, v1)

    c = h.center
    return {
        f"dirichlet_{tag}": integrate_disk(grad_log, rule),
        f"green_{tag}": integrate_log_weighted(grad2, rule),
        f"area_{tag}": 0.5 * integrate_disk(grad2, rule),
        f"4pi_log_grad0_{tag}": FOUR_PI * math.log(2.0 * math.sqrt(2.0) * abs(h.derivative_at_zero)
                                                    / (1.0 + abs(c) ** 2)),
    }


def e0_spherical(f: AnalyticDiskMap, gt: AnalyticDiskMap, rule: DiskQuadrature | None = None) -> FormulaValue:
    """Sum over both hemispheres of ``|grad log|grad f_j||^2``, Green, area and gradient-at-center terms."""
    rule = rule or default_rule()
    _check_maps(f, gt, centered=False)
    terms = _hemisphere_terms(f, rule, "1")
    terms.update(_hemisphere_terms(gt, rule, "2"))
    terms["-12pi_log2"] = -3.0 * FOUR_PI * LOG2
    return FormulaValue("e0_spherical", terms)


def frame_energy_form(f: AnalyticDiskMap, gt: AnalyticDiskMap,
                      rule: DiskQuadrature | None = None) -> FormulaValue:
    """Moving-frame assembly: ``|omega - *dG|^2``, ``2 int G K``, area, ``mu(0)`` terms.

    The Cartan form comes from the frame vectors themselves; ``G`` pulls
    back to ``log|z|`` and the Gauss curvature is 1.
    """
    rule = rule or default_rule()
    _check_maps(f, gt, centered=False)
    terms = {}
    for h, tag in ((f, "1"), (gt, "2")):
        def omega_defect(z, h=h):
            ff = frame_fields(h, z, r_max=_R)
            return 4.0 * np.abs(ff.cartan + 0.5j / z) ** 2

        def conformal(z, h=h):
            return np.exp(2.0 * mu_of(h, z, _R))

        mu0 = math.log(abs(h.derivative_at_zero)) - math.log1p(abs(h.center) ** 2) + LOG2
        terms[f"frame_dirichlet_{tag}"] = integrate_disk(omega_defect, rule)
        terms[f"green_curvature_{tag}"] = 2.0 * integrate_log_weighted(conformal, rule)
        terms[f"area_{tag}"] = integrate_disk(conformal, rule)
        terms[f"4pi_mu0_{tag}"] = FOUR_PI * (mu0 + 0.5 * LOG2)
    terms["-12pi_log2"] = -3.0 * FOUR_PI * LOG2
    return FormulaValue("frame_energy_form", terms)


def grunsky_residual(f: AnalyticDiskMap, gt: AnalyticDiskMap,
                     rule: DiskQuadrature | None = None) -> FormulaValue:
    """Cross terms, squared terms, log-weighted terms and ``4 pi``; zero for univalent pairs.

    Interior: ``X = f''/f' - 2f'/f + 2/z`` and ``Y = (f'/f)/(1+|f|^2) - 1/z``;
    exterior analogues through ``gt``.
    """
    rule = rule or default_rule()
    _check_maps(f, gt, centered=True)

    def xy_int(z):
        h, h1, h2 = f.eval(z, 2, _R)
        q, dq = f.quotient(z, _R)
        B0 = dq / q
        return h2 / h1 - 2.0 * B0, (B0 - np.conj(h) * q) / (1.0 + np.abs(h) ** 2)

    def xy_ext(z):
        w, G, G1, A, _ = _ext_maps(gt, z)
        return -(w**2) * A, w**2 * G1 * np.conj(G) / (1.0 + np.abs(G) ** 2)

    def cross(xy):
        return lambda z: 4.0 * (lambda X, Y: (X * np.conj(Y)).real)(*xy(z))

    def square(xy):
        return lambda z: 4.0 * np.abs(xy(z)[1]) ** 2

    def area_f(z):
        h, h1 = f.eval(z, 1, _R)
        return 2.0 * _density(h, h1)

    def area_g_log(z):
        w, G, G1, _, _ = _ext_maps(gt, z)
        return 2.0 * np.log(np.abs(z)) * np.abs(w) ** 4 * _density(G, G1)

    terms = {
        "cross_f": integrate_disk(cross(xy_int), rule),
        "cross_g": integrate_exterior(cross(xy_ext), rule),
        "square_f": integrate_disk(square(xy_int), rule),
        "square_g": integrate_exterior(square(xy_ext), rule),
        "log_area_f": integrate_log_weighted(area_f, rule),
        "-log_area_g": -integrate_exterior(area_g_log, rule, log_refined=True),
        "4pi": FOUR_PI,
    }
    return FormulaValue("grunsky_residual", terms)


FORMULA_FUNCS = {"s1": s1, "s1_inverted": s1_inverted, "s3": s3,
                 "e0_spherical": e0_spherical, "frame_energy_form": frame_energy_form}


# --------------------------------------------------------------------------
# orchestration


@dataclass(frozen=True)
class EnergyConfig:
    n: int = 1024
    tol: float = 1e-12
    max_iter: int = 200
    panels: int = 8
    gauss: int = 16
    angles: int = 512
    log_levels: int = 16
    mobius: bool = False
    grunsky: bool = True

    def rule(self) -> DiskQuadrature:
        if (self.panels, self.gauss, self.angles, self.log_levels) == (8, 16, 512, 16):
            return default_rule()
        return disk_rule(self.panels, self.gauss, self.angles, self.log_levels)


@dataclass
class EnergyReport:
    s1: float
    s1_inverted: float
    s3: float
    e0_spherical: float
    frame_energy_form: float
    breakdown: dict
    residuals: dict
    grunsky_residual: float | None
    metadata: dict = field(default_factory=dict)
    mobius: dict | None = None

    @property
    def values(self) -> dict:
        return {k: getattr(self, k) for k in FORMULAS}

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    @property
    def loewner_energy(self) -> float:
        """``I^L`` from the ``s1`` value."""
        return self.s1 / math.pi

    def to_json(self) -> dict:
        d = asdict(self)
        d["max_residual"] = self.max_residual
        d["loewner_energy"] = self.loewner_energy
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def csv_row(self) -> dict:
        row = {"curve": self.metadata.get("curve", "")}
        row.update(self.values)
        row["grunsky_residual"] = self.grunsky_residual
        row["max_residual"] = self.max_residual
        if self.mobius:
            row["mobius_s1"] = self.mobius["s1"]
            row["mobius_residual"] = self.mobius["residual"]
        for k in ("n", "panels", "gauss", "angles", "config_hash"):
            if k in self.metadata:
                row[k] = self.metadata[k]
        return row

    def to_csv(self) -> str:
        buf = io.StringIO()
        row = self.csv_row()
        wr = csv.DictWriter(buf, fieldnames=list(row))
        wr.writeheader()
        wr.writerow(row)
        return buf.getvalue()


def pairwise_residuals(values: dict) -> dict:
    return {f"{a}|{b}": abs(values[a] - values[b]) for a, b in itertools.combinations(values, 2)}


def recentre(c: ParametricCurve) -> tuple[ParametricCurve, complex]:
    """Translate ``c`` so that 0 lies inside; returns the curve and the shift applied."""
    if c.kind == "power-series-image" and not c.inverted:
        delta = -(complex(c.coefficients[0]) + c.shift)
        return (c.translated(delta) if delta else c), delta
    if contains(c, 0j):
        return c, 0j
    delta = -centroid(c)
    moved = c.translated(delta)
    if not contains(moved, 0j):
        raise InvalidCurveError("cannot place the origin inside the curve")
    return moved, delta


def solve_pair(c: ParametricCurve, config: EnergyConfig = EnergyConfig(), taylor: bool = True):
    """Interior map (``f(0) = 0``) and inverted exterior map of a centred curve.

    Power-series images whose constant term has been moved to 0 enter as
    explicit Taylor maps unless ``taylor`` is false.
    """
    exact = (c.kind == "power-series-image" and not c.inverted
             and abs(c.coefficients[0] + c.shift) < 1e-15)
    if taylor and exact:
        coeffs = np.array(c.coefficients)
        coeffs[0] += c.shift
        f = from_taylor(coeffs, curve=c, n=config.n)
    else:
        f = solve_interior_map(c, 0j, config.n, config.tol, config.max_iter)
    gt = solve_exterior_via_inversion(c, config.n, config.tol, config.max_iter)
    return f, gt


def formula_values(f, gt, rule=None, grunsky: bool = True):
    results = {name: fn(f, gt, rule) for name, fn in FORMULA_FUNCS.items()}
    gr = grunsky_residual(f, gt, rule) if grunsky else None
    return results, gr


def full_report(c: ParametricCurve, config: EnergyConfig = EnergyConfig(),
                center: complex | None = None, extra_metadata: dict | None = None) -> EnergyReport:
    """Solve both maps of ``c`` and evaluate every formula.

    ``center`` (an interior point) is moved to the origin; by default the
    curve is recentred only when the origin lies outside it.
    """
    if not c.closed:
        raise InvalidCurveError("energy needs a closed curve")
    if center is None:
        c, delta = recentre(c)
    else:
        delta = -complex(center)
        c = c.translated(delta)
        if not contains(c, 0j):
            raise InvalidCurveError(f"center {center} is not inside the curve")
    f, gt = solve_pair(c, config, taylor=center is None)
    rule = config.rule()
    results, gr = formula_values(f, gt, rule, config.grunsky)
    values = {k: v.value for k, v in results.items()}
    breakdown = {k: v.terms for k, v in results.items()}
    if gr is not None:
        breakdown["grunsky_residual"] = gr.terms
    meta = {
        "curve": c.label,
        "recentre_shift": [delta.real, delta.imag],
        "n": config.n,
        "tol": config.tol,
        "solver": {"f_iterations": f.iterations, "f_residual": f.residual, "f_tail": f.tail_bound,
                   "gt_iterations": gt.iterations, "gt_residual": gt.residual, "gt_tail": gt.tail_bound},
        "panels": rule.n_panels, "gauss": rule.n_gauss, "angles": rule.n_theta,
        "log_levels": rule.log_levels,
        "version": __version__,
    }
    meta.update(extra_metadata or {})
    mobius = None
    if config.mobius:
        inv = invert_curve(c)
        f2 = solve_interior_map(inv, 0j, config.n, config.tol, config.max_iter)
        g2 = solve_exterior_via_inversion(inv, config.n, config.tol, config.max_iter)
        m = s1(f2, g2, rule).value
        mobius = {"s1": m, "residual": abs(m - values["s1"])}
    return EnergyReport(**values, breakdown=breakdown, residuals=pairwise_residuals(values),
                        grunsky_residual=None if gr is None else gr.value, metadata=meta,
                        mobius=mobius)
