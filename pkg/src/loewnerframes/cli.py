"""Command-line front end.

Subcommands::

    loewnerframes energy      --curve ellipse:0.2
    loewnerframes frames      --curve poly:0,1,0,0.1
    loewnerframes convergence --curve poly:0,1,0,0.1
    loewnerframes audit       [--only optimal2] [--threshold 1e-9]

Exit codes: 0 success, 1 threshold breach, 2 invalid curve or solver
failure, 3 quadrature failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .conformal import shrink_map
from .energy import EnergyConfig, full_report, recentre, s1, solve_pair
from .errors import InvalidCurveError, LoewnerError, QuadratureError, SolverError
from .geometry import make_family, parse_curve_spec

EXIT_OK, EXIT_THRESHOLD, EXIT_SOLVER, EXIT_QUADRATURE = 0, 1, 2, 3
FORMATS = ("json", "csv")

DEFAULT_THRESHOLDS = {
    "residual": 1e-5,
    "grunsky": 1e-6,
    "mobius": 1e-5,
    "frame_exact": 1e-9,
    "frame_fd": 1e-4,
    "audit": 1e-9,
}


@dataclass
class RunConfig:
    curve: str = "circle"
    center: complex | None = None
    n: int = 1024
    tol: float = 1e-12
    max_iter: int = 200
    panels: int = 8
    gauss: int = 16
    angles: int = 512
    log_levels: int = 16
    format: str = "json"
    out: str = "out"
    frames: bool = True
    grunsky: bool = True
    convergence: bool = False
    mobius: bool = False
    only: list = field(default_factory=list)
    thresholds: dict = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))

    def __post_init__(self):
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two, got {self.n}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        merged = dict(DEFAULT_THRESHOLDS)
        merged.update(self.thresholds)
        self.thresholds = merged

    def energy_config(self) -> EnergyConfig:
        return EnergyConfig(self.n, self.tol, self.max_iter, self.panels, self.gauss,
                            self.angles, self.log_levels, self.mobius, self.grunsky)

    def to_json(self) -> dict:
        d = dataclasses.asdict(self)
        if self.center is not None:
            d["center"] = [self.center.real, self.center.imag]
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        if isinstance(doc.get("center"), list):
            doc["center"] = complex(*doc["center"])
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


def stamp(config: RunConfig) -> dict:
    return {"config_hash": config.config_hash, "version": __version__,
            "numpy": np.__version__}


def _outdir(config: RunConfig) -> Path:
    p = Path(config.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_rows(path: Path, rows: list[dict], config: RunConfig) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(rows[0]) if rows else []
    with path.open("w", newline="") as fh:
        fh.write(f"# config_hash={config.config_hash} version={__version__}\n")
        wr = csv.DictWriter(fh, fieldnames=header)
        wr.writeheader()
        wr.writerows(rows)


def _fail(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _guard(fn):
    """Map library exceptions onto exit codes."""

    def wrapped(config: RunConfig) -> int:
        try:
            return fn(config)
        except QuadratureError as exc:
            return _fail(EXIT_QUADRATURE, f"quadrature failure: {exc}")
        except (InvalidCurveError, SolverError) as exc:
            return _fail(EXIT_SOLVER, f"{type(exc).__name__}: {exc}")
        except LoewnerError as exc:
            return _fail(EXIT_SOLVER, f"{type(exc).__name__}: {exc}")
        except (OSError, KeyError, ValueError) as exc:
            return _fail(EXIT_SOLVER, f"invalid curve input: {exc}")

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


# --------------------------------------------------------------------------
# energy


@_guard
def cmd_energy(config: RunConfig) -> int:
    """Energy report by all formulas; exit 1 if a residual exceeds its threshold."""
    curve = parse_curve_spec(config.curve, config.n)
    report = full_report(curve, config.energy_config(), center=config.center,
                         extra_metadata=stamp(config))
    out = _outdir(config)
    (out / "report.json").write_text(report.dumps())
    (out / "report.csv").write_text(f"# config_hash={config.config_hash} version={__version__}\n"
                                    + report.to_csv())
    if config.format == "json":
        summary = {"curve": report.metadata["curve"],
                   "loewner_energy": {k: v / math.pi for k, v in report.values.items()},
                   "max_residual": report.max_residual,
                   "grunsky_residual": report.grunsky_residual,
                   "mobius": report.mobius}
        print(json.dumps(summary, indent=2))
    else:
        sys.stdout.write(report.to_csv())

    th = config.thresholds
    failures = [f"residual {k} = {v:.3e} > {th['residual']:.0e}"
                for k, v in report.residuals.items() if v > th["residual"]]
    if report.grunsky_residual is not None and abs(report.grunsky_residual) > th["grunsky"]:
        failures.append(f"grunsky_residual = {report.grunsky_residual:.3e} > {th['grunsky']:.0e}")
    if report.mobius and report.mobius["residual"] > th["mobius"]:
        failures.append(f"mobius residual = {report.mobius['residual']:.3e} > {th['mobius']:.0e}")
    for msg in failures:
        print(f"FAIL {msg}", file=sys.stderr)
    return EXIT_THRESHOLD if failures else EXIT_OK


# --------------------------------------------------------------------------
# frames


def frame_checks(f, h: float = 2e-3) -> dict:
    """Residual maxima of the frame identities for the map ``f``."""
    from . import frames as fr

    e = np.exp(2j * np.pi * np.arange(512) / 512)
    ring = 0.9 * e
    ff = fr.frame_fields(f, ring)
    probes = np.array([0.5, 0.3 + 0.4j, 0.6j, -0.5 + 0.2j])
    liou = [np.max(np.abs(fr.liouville_residual(f, probes, s))) for s in (h, h / 2)]
    harm = [max(np.max(np.abs(x)) for x in fr.harmonicity_residuals(f, probes, s)) for s in (h, h / 2)]
    trace = fr.geodesic_curvature_disk(f)
    return {
        "exact": {
            "orthonormality": float(np.max(fr.orthonormality_residual(ff))),
            "cartan": float(np.max(np.abs(fr.cartan_residual(f, ring)))),
        },
        "fd": {
            "liouville": float(liou[1]),
            "harmonicity": float(harm[1]),
            "neumann": float(np.max(np.abs(fr.neumann_residual(f)))),
        },
        "ratios": {
            "liouville": float(liou[0] / liou[1]) if liou[1] > 0 else math.inf,
            "harmonicity": float(harm[0] / harm[1]) if harm[1] > 0 else math.inf,
        },
        "curvature": {"sobolev_minus_half": trace.sobolev_minus_half,
                      "k_min": float(trace.k.min()), "k_max": float(trace.k.max())},
        "_trace": trace,
    }


@_guard
def cmd_frames(config: RunConfig) -> int:
    """Frame identity residuals, curvature traces and the spiral diagnostic."""
    from . import frames as fr

    curve = parse_curve_spec(config.curve, config.n)
    out = _outdir(config)
    th = config.thresholds
    if not curve.closed:
        eps = curve.params["eps"]
        value = fr.spiral_diagnostics(eps)
        t = np.array([1e-2, 1e-3])
        pointwise = float(np.max(np.abs(fr.geodesic_curvature_halfplane(fr.spiral_preschwarzian(t))
                                        - fr.spiral_curvature(t)) / np.abs(fr.spiral_curvature(t))))
        result = {"spiral_integral": value, "bound": fr.SPIRAL_BOUND, "below_bound": value < fr.SPIRAL_BOUND,
                  "curvature_formula_rel_error": pointwise, **stamp(config)}
        (out / "frames.json").write_text(json.dumps(result, indent=2))
        print(f"spiral eps={eps}: integral {value:.10f}  bound {fr.SPIRAL_BOUND:.10f}")
        return EXIT_OK if value < fr.SPIRAL_BOUND else EXIT_THRESHOLD

    c, _ = recentre(curve)
    f, _ = solve_pair(c, config.energy_config())
    checks = frame_checks(f)
    trace = checks.pop("_trace")
    tag = f"config_hash={config.config_hash} version={__version__}"
    fr.write_curvature_csv(out / "traces" / "curvature.csv", trace, tag)
    ring = 0.9 * np.exp(2j * np.pi * np.arange(512) / 512)
    fr.write_frames_csv(out / "traces" / "frames.csv", f, ring, tag)
    doc = {"curve": c.label, **checks, **stamp(config)}
    (out / "frames.json").write_text(json.dumps(doc, indent=2))
    print(json.dumps(doc, indent=2))
    failures = [f"{k} = {v:.3e}" for k, v in checks["exact"].items() if v > th["frame_exact"]]
    failures += [f"{k} = {v:.3e}" for k, v in checks["fd"].items() if v > th["frame_fd"]]
    for msg in failures:
        print(f"FAIL {msg}", file=sys.stderr)
    return EXIT_THRESHOLD if failures else EXIT_OK


# --------------------------------------------------------------------------
# convergence


EPSILONS = (1e-1, 1e-2, 1e-3, 1e-4)
RESOLUTIONS = ((4, 128), (8, 256), (16, 512), (32, 1024))
ROUNDING_FLOOR = 1e-12


def epsilon_table(curve, config: RunConfig) -> list[dict]:
    """``s1`` of the smoothed maps ``f_eps`` against ``eps``."""
    from .conformal import from_taylor

    ec = config.energy_config()
    c, _ = recentre(curve)
    f, _ = solve_pair(c, ec)
    rule = ec.rule()
    rows, prev = [], None
    for eps in EPSILONS:
        fe = shrink_map(f, eps)
        ce = make_family("power-series-image", n=config.n, coefficients=fe.taylor)
        fe = from_taylor(fe.taylor, curve=ce, n=config.n)
        _, ge = solve_pair(ce, ec)
        value = s1(fe, ge, rule).value
        rows.append({"table": "epsilon", "eps": eps, "N": config.n, "value": value,
                     "difference": "" if prev is None else abs(value - prev)})
        prev = value
    return rows


def resolution_table(curve, config: RunConfig) -> list[dict]:
    """``s1`` under successive doublings of the quadrature (panels, angles)."""
    from .quadrature import disk_rule

    c, _ = recentre(curve)
    f, gt = solve_pair(c, config.energy_config())
    rows, prev = [], None
    for panels, angles in RESOLUTIONS:
        value = s1(f, gt, disk_rule(panels, config.gauss, angles, config.log_levels)).value
        rows.append({"table": "resolution", "eps": "", "N": f"{panels}x{angles}", "value": value,
                     "difference": "" if prev is None else abs(value - prev)})
        prev = value
    return rows


def check_decreasing(diffs: list[float], factor: float = 1.0) -> bool:
    """Successive differences shrink by ``factor`` until they reach the rounding floor."""
    for a, b in zip(diffs, diffs[1:]):
        if a <= ROUNDING_FLOOR and b <= ROUNDING_FLOOR:
            continue
        if not b * factor < a:
            return False
    return True


@_guard
def cmd_convergence(config: RunConfig) -> int:
    """Tables of ``s1`` over the smoothing family and quadrature doublings."""
    curve = parse_curve_spec(config.curve, config.n)
    rows = []
    ok = True
    if curve.kind == "power-series-image":
        eps_rows = epsilon_table(curve, config)
        rows += eps_rows
        ok &= check_decreasing([r["difference"] for r in eps_rows[1:]])
    res_rows = resolution_table(curve, config)
    rows += res_rows
    ok &= check_decreasing([r["difference"] for r in res_rows[1:]], 4.0)
    out = _outdir(config)
    _write_rows(out / "convergence.csv", rows, config)
    for r in rows:
        d = r["difference"]
        print(f"{r['table']:<10} {str(r['eps']):>8} {r['N']:>10} {r['value']:.15e} "
              f"{'' if d == '' else f'{d:.3e}'}")
    return EXIT_OK if ok else EXIT_THRESHOLD


# --------------------------------------------------------------------------
# audit


def audit_constants() -> dict:
    """Closed-form constants: name -> (computed, expected)."""
    from .conformal import from_taylor
    from .energy import e0_spherical, grunsky_residual, s3
    from .frames import dirichlet_energy
    from .geometry import inverse_stereographic
    from .quadrature import default_rule, integrate_disk, integrate_log_weighted

    rule = default_rule()
    ident = from_taylor([0.0, 1.0])
    pi, l2 = math.pi, math.log(2.0)

    def grad0():
        h = 1e-6
        jac = [(inverse_stereographic(d * h) - inverse_stereographic(-d * h)) / (2 * h) for d in (1.0, 1j)]
        return float(np.sqrt(sum(np.sum(j**2) for j in jac)))

    e0 = e0_spherical(ident, ident, rule).terms
    return {
        "eq7": (lambda: integrate_disk(lambda z: 4 * np.abs(z) ** 2 / (1 + np.abs(z) ** 2) ** 2, rule),
                4 * pi * l2 - 2 * pi),
        "optimal2": (lambda: integrate_log_weighted(lambda z: 4 / (1 + np.abs(z) ** 2) ** 2, rule),
                     -2 * pi * l2),
        "optimal2_doubled": (lambda: integrate_log_weighted(lambda z: 8 / (1 + np.abs(z) ** 2) ** 2, rule),
                             -4 * pi * l2),
        "optimal3": (lambda: dirichlet_energy(ident, rule), 4 * pi * l2 - 2 * pi),
        "grad_at_center": (grad0, 2 * math.sqrt(2.0)),
        "second_part": (lambda: 8 * math.log(grad0()) - 12 * l2, 0.0),
        "hemisphere_total": (lambda: math.fsum(v for k, v in e0.items() if k.endswith("_1")), 6 * pi * l2),
        "sphere_area": (lambda: e0["area_1"] + e0["area_2"], 4 * pi),
        "s3_circle": (lambda: s3(ident, ident, rule).value, 0.0),
        "grunsky_circle": (lambda: grunsky_residual(ident, ident, rule).value, 0.0),
    }


def cmd_audit(config: RunConfig) -> int:
    """Check every closed-form constant; exit 1 listing failures."""
    tol = config.thresholds["audit"]
    table = audit_constants()
    names = config.only or list(table)
    unknown = [n for n in names if n not in table]
    if unknown:
        return _fail(EXIT_SOLVER, f"unknown constants {unknown}; choose from {sorted(table)}")
    failures = []
    for name in names:
        fn, expected = table[name]
        got = fn()
        err = abs(got - expected)
        ok = err <= tol
        print(f"{'PASS' if ok else 'FAIL'} {name:<18} computed {got: .15f}  expected {expected: .15f}  "
              f"|diff| {err:.2e}")
        if not ok:
            failures.append(name)
    if failures:
        print(f"{len(failures)} constant(s) failed at tol {tol:.0e}: {', '.join(failures)}", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _complex(s: str) -> complex:
    return complex(s.replace(" ", ""))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loewnerframes", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("energy", "energy report by all formulas"),
                           ("frames", "moving-frame identity residuals"),
                           ("convergence", "smoothing and resolution tables"),
                           ("audit", "closed-form constant checks")):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
        s.add_argument("--curve", help="circle[:R] | ellipse:RHO[@X,Y] | poly:a0,a1,... | spiral:EPS | file:PATH")
        s.add_argument("--center", type=_complex, help="interior point sent to the origin, e.g. 0.1+0.2j")
        s.add_argument("--n", type=int, help="boundary nodes (power of two)")
        s.add_argument("--tol", type=float, help="solver boundary residual tolerance")
        s.add_argument("--max-iter", type=int, dest="max_iter")
        s.add_argument("--panels", type=int)
        s.add_argument("--gauss", type=int)
        s.add_argument("--angles", type=int)
        s.add_argument("--format", choices=FORMATS)
        s.add_argument("--out", help="output directory")
        s.add_argument("--only", action="append", help="audit: restrict to this constant (repeatable)")
        s.add_argument("--threshold", type=float,
                       help="energy: residual threshold; frames: exact-identity threshold; audit: tolerance")
        s.add_argument("--mobius", action="store_true", default=None, help="energy: re-solve on the inverted curve")
        s.add_argument("--no-grunsky", dest="grunsky", action="store_false", default=None)
    return p


THRESHOLD_KEY = {"energy": "residual", "frames": "frame_exact", "audit": "audit", "convergence": "residual"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    for key in ("curve", "center", "n", "tol", "max_iter", "panels", "gauss", "angles",
                "format", "out", "only", "mobius", "grunsky"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    if isinstance(doc.get("center"), complex):
        doc["center"] = [doc["center"].real, doc["center"].imag]
    if args.threshold is not None:
        doc.setdefault("thresholds", {})[THRESHOLD_KEY[args.command]] = args.threshold
    return RunConfig.from_json(doc)


COMMANDS = {"energy": cmd_energy, "frames": cmd_frames, "convergence": cmd_convergence, "audit": cmd_audit}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_SOLVER, f"invalid configuration: {exc}")
    return COMMANDS[args.command](config)


if __name__ == "__main__":
    sys.exit(main())
