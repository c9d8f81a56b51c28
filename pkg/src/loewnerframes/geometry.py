"""Curve representations, stereographic projection and built-in test curves.

Conventions
-----------
Stereographic projection is ``pi(x, y, z) = (x + i y) / (1 - z)`` from the
north pole ``N = (0, 0, 1)``; its inverse sends the unit disk to the
southern hemisphere and ``0`` to ``S = (0, 0, -1)``.

Closed curves are stored as a parametrization ``t -> gamma(t)`` on
``[0, 2 pi)`` together with a sample count ``n`` (a power of two).  The
bounded component of a positively oriented curve lies to its left.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import CurveThroughOriginError, InvalidCurveError, PoleInputError

NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = np.array([0.0, 0.0, -1.0])

KINDS = ("circle", "ellipse", "power-series-image", "fourier-boundary", "spiral-arc")
DEFAULT_SAMPLES = 1024


class SpherePoint(NamedTuple):
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def inverse_stereographic(z) -> np.ndarray:
    """Map complex numbers to the unit sphere.

    Returns an array of shape ``z.shape + (3,)``; a scalar input gives a
    length-3 vector ``(2 Re z, 2 Im z, |z|^2 - 1) / (1 + |z|^2)``.
    """
    z = np.asarray(z, dtype=complex)
    m = np.abs(z) ** 2
    d = 1.0 + m
    return np.stack([2.0 * z.real / d, 2.0 * z.imag / d, (m - 1.0) / d], axis=-1)


def inverse_stereographic_point(z: complex) -> SpherePoint:
    x, y, w = inverse_stereographic(complex(z))
    return SpherePoint(float(x), float(y), float(w))


def inverse_stereographic_gradient_norm(z) -> np.ndarray:
    """Frobenius norm of the Jacobian of the inverse projection, ``2 sqrt 2 / (1 + |z|^2)``."""
    z = np.asarray(z, dtype=complex)
    return 2.0 * math.sqrt(2.0) / (1.0 + np.abs(z) ** 2)


def stereographic(p, pole_tol: float = 1e-12):
    """Project points of the sphere (last axis of length 3) to the plane."""
    p = np.asarray(p, dtype=float)
    x, y, w = p[..., 0], p[..., 1], p[..., 2]
    denom = 1.0 - w
    if np.any(np.abs(denom) <= pole_tol):
        raise PoleInputError("cannot project the north pole")
    out = (x + 1j * y) / denom
    return complex(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# curves


def _freeze(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParametricCurve:
    """A Jordan curve (or, for ``spiral-arc``, an open arc) in the plane.

    ``coefficients`` holds Taylor coefficients ``a_0..a_M`` for
    ``power-series-image`` (``gamma(t) = sum a_k e^{ikt}``) and Fourier
    coefficients ``c_{-K}..c_K`` for every other closed kind
    (``gamma(t) = sum c_n e^{int}``).  ``shift`` is added to the base curve,
    then ``inverted`` applies ``z -> 1/z``.
    """

    kind: str
    coefficients: np.ndarray
    params: dict = field(default_factory=dict)
    n: int = DEFAULT_SAMPLES
    positive: bool = True
    shift: complex = 0j
    inverted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coefficients", _freeze(self.coefficients))
        object.__setattr__(self, "params", dict(self.params))
        if self.kind not in KINDS:
            raise InvalidCurveError(f"unknown curve kind {self.kind!r}")
        if self.n < 4 or self.n & (self.n - 1):
            raise InvalidCurveError(f"sample count must be a power of two, got {self.n}")

    @property
    def closed(self) -> bool:
        return self.kind != "spiral-arc"

    @property
    def label(self) -> str:
        if self.kind == "ellipse":
            s = f"ellipse:{self.params.get('rho')}"
        elif self.kind == "circle":
            s = f"circle:{self.params.get('radius', 1.0)}"
        else:
            s = self.kind
        if self.shift:
            s += f"+({self.shift.real:g}{self.shift.imag:+g}j)"
        return ("inv:" + s) if self.inverted else s

    def _base(self, t, derivative: bool):
        t = np.asarray(t, dtype=float)
        c = self.coefficients
        if self.kind == "spiral-arc":
            if derivative:
                ll = np.log(np.log(t + 0j))
                return (1 + 1j / np.log(t + 0j)) * np.exp(1j * ll)
            return t * np.exp(1j * np.log(np.log(t + 0j)))
        if self.kind == "power-series-image":
            k = np.arange(len(c))
        else:
            kmax = (len(c) - 1) // 2
            k = np.arange(-kmax, kmax + 1)
        e = np.exp(1j * np.multiply.outer(t, k))
        if derivative:
            return e @ (1j * k * c)
        return e @ c

    def points(self, t) -> np.ndarray:
        w = self._base(t, False) + self.shift
        return 1.0 / w if self.inverted else w

    def derivative(self, t) -> np.ndarray:
        d = self._base(t, True)
        if self.inverted:
            w = self._base(t, False) + self.shift
            return -d / w**2
        return d

    def parameters(self, n: int | None = None) -> np.ndarray:
        n = self.n if n is None else n
        if self.kind == "spiral-arc":
            eps = self.params["eps"]
            return eps * (np.arange(1, n + 1) / (n + 1))
        return 2.0 * np.pi * np.arange(n) / n

    def samples(self, n: int | None = None) -> np.ndarray:
        return self.points(self.parameters(n))

    def translated(self, delta: complex) -> "ParametricCurve":
        if self.inverted:
            raise InvalidCurveError("translate before inverting")
        return ParametricCurve(self.kind, self.coefficients, self.params, self.n,
                               self.positive, self.shift + complex(delta), False)

    def with_samples(self, n: int) -> "ParametricCurve":
        return ParametricCurve(self.kind, self.coefficients, self.params, n,
                               self.positive, self.shift, self.inverted)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "params": {k: ([v.real, v.imag] if isinstance(v, complex) else v)
                       for k, v in self.params.items()},
            "fourier": [[float(a.real), float(a.imag)] for a in self.coefficients],
            "N": self.n,
            "shift": [self.shift.real, self.shift.imag],
            "inverted": self.inverted,
            "positive": self.positive,
        }


def invert_curve(c: ParametricCurve, tol: float = 1e-9) -> ParametricCurve:
    """Return the image of ``c`` under ``z -> 1/z`` (orientation flips)."""
    if not c.closed:
        raise InvalidCurveError("only closed curves can be inverted")
    if np.min(np.abs(c.samples(max(c.n, 4096)))) <= tol:
        raise CurveThroughOriginError("curve passes through the origin")
    return ParametricCurve(c.kind, c.coefficients, c.params, c.n, not c.positive,
                           c.shift, not c.inverted)


# --------------------------------------------------------------------------
# validation


def _orient(ax, ay, bx, by, cx, cy):
    return np.sign((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))


def self_intersections(z: np.ndarray, chunk: int = 256) -> int:
    """Count properly crossing pairs of non-adjacent edges of a closed polygon.

    Plain O(N^2) scan; collinear overlaps are not detected.
    """
    z = np.asarray(z, dtype=complex)
    n = len(z)
    p, q = z, np.roll(z, -1)
    px, py, qx, qy = p.real, p.imag, q.real, q.imag
    count = 0
    j = np.arange(n)
    for start in range(0, n, chunk):
        i = np.arange(start, min(start + chunk, n))[:, None]
        o1 = _orient(px[i], py[i], qx[i], qy[i], px[j], py[j])
        o2 = _orient(px[i], py[i], qx[i], qy[i], qx[j], qy[j])
        o3 = _orient(px[j], py[j], qx[j], qy[j], px[i], py[i])
        o4 = _orient(px[j], py[j], qx[j], qy[j], qx[i], qy[i])
        gap = (j - i) % n
        hit = (o1 * o2 < 0) & (o3 * o4 < 0) & (gap > 1) & (gap < n - 1) & (j > i)
        count += int(hit.sum())
    return count


def winding_number(z: np.ndarray, point: complex = 0j) -> int:
    d = np.asarray(z) - point
    turns = np.angle(np.roll(d, -1) / d).sum() / (2 * np.pi)
    return int(round(turns))


def check_jordan(c: ParametricCurve, n: int | None = None) -> None:
    if not c.closed:
        return
    z = c.samples(n)
    if not np.all(np.isfinite(z)):
        raise InvalidCurveError("curve samples are not finite")
    k = self_intersections(z)
    if k:
        raise InvalidCurveError(f"sampled curve self-intersects ({k} crossing pairs at N={len(z)})")
    w = winding_number(z, np.mean(z))
    if abs(w) > 1:
        raise InvalidCurveError("curve winds more than once")


def contains(c: ParametricCurve, point: complex, n: int | None = None) -> bool:
    return winding_number(c.samples(n), point) != 0


def centroid(c: ParametricCurve, n: int | None = None) -> complex:
    """Area centroid of the sampled polygon."""
    z = c.samples(n)
    x, y = z.real, z.imag
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    a = cross.sum() / 2
    cx = ((x + x1) * cross).sum() / (6 * a)
    cy = ((y + y1) * cross).sum() / (6 * a)
    return complex(cx, cy)


# --------------------------------------------------------------------------
# families


def make_family(kind: str, n: int = DEFAULT_SAMPLES, check_n: int | None = None, **params) -> ParametricCurve:
    """Build one of the built-in test curves.

    ``circle(radius=1, center=0)``, ``ellipse(rho, shift=0)`` (image of the
    unit circle under ``w + rho/w``), ``power-series-image(coefficients)``
    (image of the circle under a polynomial), ``fourier-boundary(fourier)``
    with ``c_{-K}..c_K``, and the open ``spiral-arc(eps)``.
    """
    shift = complex(params.pop("shift", 0.0))
    if kind == "circle":
        radius = float(params.get("radius", 1.0))
        center = complex(params.get("center", 0.0))
        if radius <= 0:
            raise InvalidCurveError("radius must be positive")
        c = ParametricCurve("circle", [0, center, radius], {"radius": radius, "center": center}, n, shift=shift)
    elif kind == "ellipse":
        rho = float(params["rho"])
        if not 0.0 <= rho < 1.0:
            raise InvalidCurveError(f"ellipse requires 0 <= rho < 1, got {rho}")
        c = ParametricCurve("ellipse", [rho, 0, 1], {"rho": rho}, n, shift=shift)
    elif kind == "power-series-image":
        coeffs = np.asarray(params["coefficients"], dtype=complex)
        if len(coeffs) < 2 or coeffs[1] == 0:
            raise InvalidCurveError("power series needs a nonzero linear coefficient")
        c = ParametricCurve(kind, coeffs, {}, n, shift=shift)
        _check_derivative(coeffs)
    elif kind == "fourier-boundary":
        coeffs = np.asarray(params["fourier"], dtype=complex)
        if len(coeffs) % 2 == 0:
            raise InvalidCurveError("fourier coefficients must be indexed -K..K (odd length)")
        c = ParametricCurve(kind, coeffs, {}, n, shift=shift)
        z = c.samples()
        if winding_number(z, np.mean(z)) < 0:
            c = ParametricCurve(kind, coeffs, {}, n, positive=False, shift=shift)
    elif kind == "spiral-arc":
        eps = float(params.get("eps", 0.5))
        if not 0.0 < eps < 1.0:
            raise InvalidCurveError("spiral-arc requires 0 < eps < 1")
        return ParametricCurve("spiral-arc", [], {"eps": eps}, n)
    else:
        raise InvalidCurveError(f"unknown curve kind {kind!r}")
    check_jordan(c, check_n)
    return c


def _check_derivative(coeffs: np.ndarray, n_r: int = 64, n_t: int = 256) -> None:
    from .errors import NonUnivalentError

    k = np.arange(1, len(coeffs))
    d = k * coeffs[1:]
    r = np.linspace(0.0, 1.0, n_r)
    t = 2 * np.pi * np.arange(n_t) / n_t
    z = np.multiply.outer(r, np.exp(1j * t)).ravel()
    vals = np.polynomial.polynomial.polyval(z, d)
    scale = np.abs(d).sum()
    if np.min(np.abs(vals)) < 1e-3 * scale:
        raise NonUnivalentError("derivative of the power series vanishes on the closed disk (not univalent)")


def parse_curve_spec(spec: str, n: int = DEFAULT_SAMPLES) -> ParametricCurve:
    """Parse a command-line curve spec.

    ``circle``, ``circle:R``, ``ellipse:RHO``, ``ellipse:RHO@X,Y`` (shifted),
    ``poly:a0,a1,...`` (real Taylor coefficients), ``spiral:EPS``,
    ``file:path.json``.
    """
    head, _, rest = spec.partition(":")
    shift = 0j
    if "@" in rest:
        rest, _, at = rest.partition("@")
        xs = [float(v) for v in at.split(",")]
        shift = complex(xs[0], xs[1] if len(xs) > 1 else 0.0)
    if head == "circle":
        return make_family("circle", n=n, radius=float(rest) if rest else 1.0, shift=shift)
    if head == "ellipse":
        return make_family("ellipse", n=n, rho=float(rest), shift=shift)
    if head == "poly":
        coeffs = [complex(v) for v in rest.split(",")]
        return make_family("power-series-image", n=n, coefficients=coeffs, shift=shift)
    if head == "spiral":
        return make_family("spiral-arc", n=n, eps=float(rest) if rest else 0.5)
    if head == "file":
        return load_curve(rest)
    raise InvalidCurveError(f"cannot parse curve spec {spec!r}")


def curve_from_json(doc: dict) -> ParametricCurve:
    kind = doc["kind"]
    n = int(doc.get("N", DEFAULT_SAMPLES))
    params = {k: (complex(*v) if isinstance(v, list) else v)
              for k, v in doc.get("params", {}).items()}
    if "shift" in doc:
        sx = doc["shift"]
        params["shift"] = complex(sx[0], sx[1]) if isinstance(sx, list) else complex(sx)
    coeffs = [complex(a, b) for a, b in doc.get("fourier", [])]
    if kind == "power-series-image":
        params["coefficients"] = coeffs
    elif kind == "fourier-boundary":
        params["fourier"] = coeffs
    c = make_family(kind, n=n, **params)
    if doc.get("inverted"):
        c = invert_curve(c)
    return c


def load_curve(path: str | Path) -> ParametricCurve:
    return curve_from_json(json.loads(Path(path).read_text()))
