"""Interior and inverted-exterior conformal maps of star-like Jordan curves.

The interior map ``f : D -> Omega`` is computed with a Theodorsen-type
fixed point on the boundary correspondence ``S``:

    Phi(S(t)) = t + K[log |gamma(S(t)) - c|],

where ``Phi`` is a continuous lift of ``arg(gamma - c)`` and ``K`` is the
circle conjugation operator, applied with the FFT.  The exterior map is
never represented directly.  It is carried by the interior map ``gt`` of
the inverted curve ``1/gamma``, with ``g(z) = 1 / gt(1/z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    DegenerateMapError,
    MismatchedCurveError,
    NoConvergenceError,
    NonzeroCenterError,
    NotStarLikeError,
    OutOfRadiusError,
    SolverError,
)
from .geometry import ParametricCurve, contains, invert_curve

R_MAX = 1.0 - 1e-6
ROLES = ("interior", "inverted-exterior")


def _frozen(a, dtype=complex):
    if a is None:
        return None
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _trim(c: np.ndarray, rel: float = 1e-14) -> np.ndarray:
    """Drop the longest trailing block whose total size is below ``rel`` of the whole.

    Such a block changes values on the closed disk by less than ``rel``
    relative; for solved maps it is rounding noise.
    """
    mags = np.abs(c)
    tail = np.cumsum(mags[::-1])[::-1]
    keep = np.flatnonzero(tail > rel * mags.sum())
    return c[: max(int(keep[-1]) + 1 if keep.size else 1, 2)]


def tail_estimate(c: np.ndarray, window: int = 10) -> float:
    """Geometric extrapolation of the coefficient tail beyond the last index."""
    mags = np.abs(np.asarray(c))
    if mags.size < window + 1 or mags[-1] == 0.0:
        return 0.0
    first, last = mags[-window], mags[-1]
    if first == 0.0:
        return float(last)
    q = min((last / first) ** (1.0 / (window - 1)), 0.999)
    return float(last * q / (1.0 - q))


@dataclass(frozen=True, eq=False)
class AnalyticDiskMap:
    """A univalent map of the unit disk given by Taylor data at 0.

    Attributes
    ----------
    taylor : complex array
        Coefficients ``a_0..a_M``; ``a_1`` is real and positive.
    boundary_correspondence : real array or None
        Increasing lift ``S(t_k)``, ``t_k = 2 pi k / N``, of the positively
        traversed curve parameter: ``f(e^{i t_k}) = gamma(orientation * S(t_k))``.
    orientation : int
        ``+1`` if ``curve`` is positively oriented, else ``-1``.
    role : str
        ``"interior"`` for ``f``, ``"inverted-exterior"`` for ``gt``.
    """

    taylor: np.ndarray
    boundary_correspondence: np.ndarray | None = None
    role: str = "interior"
    residual: float = 0.0
    tail_bound: float = 0.0
    iterations: int = 0
    orientation: int = 1
    curve: ParametricCurve | None = field(default=None, repr=False)

    def __post_init__(self):
        t = _frozen(self.taylor)
        if t.ndim != 1 or t.size < 2:
            raise DegenerateMapError("need at least the coefficients a_0 and a_1")
        if abs(t[1]) < 1e-12:
            raise DegenerateMapError(f"|f'(0)| = {abs(t[1]):.3e} is degenerate")
        if self.role not in ROLES:
            raise ValueError(f"role must be one of {ROLES}")
        object.__setattr__(self, "taylor", t)
        object.__setattr__(self, "boundary_correspondence",
                           _frozen(self.boundary_correspondence, float))
        object.__setattr__(self, "_fast", _trim(t))

    @property
    def center(self) -> complex:
        return complex(self.taylor[0])

    @property
    def derivative_at_zero(self) -> complex:
        return complex(self.taylor[1])

    @property
    def real_positive(self) -> bool:
        a1 = self.taylor[1]
        return bool(a1.imag == 0.0 and a1.real > 0.0)

    def _check_radius(self, z, r_max):
        z = np.asarray(z, dtype=complex)
        if z.size and np.max(np.abs(z)) > r_max * (1.0 + 4e-16):
            raise OutOfRadiusError(f"|z| = {np.max(np.abs(z)):.12g} exceeds r_max = {r_max}")
        return z

    def eval(self, z, order: int = 2, r_max: float = R_MAX):
        """Values of ``f, f', f''`` (up to ``order``).

        Points on a polar grid (rows ``r_i e^{2 pi i j/n}``) are evaluated
        with one FFT per row; anything else uses Horner's scheme.
        """
        z = self._check_radius(z, r_max)
        return _evaluate(self._fast, z, order)

    def quotient(self, z, r_max: float = R_MAX):
        """``q = (f - a_0)/z`` and ``q'``, regular at 0.

        For ``a_0 = 0`` this gives ``f'/f - 1/z = q'/q`` without cancellation.
        """
        z = self._check_radius(z, r_max)
        q, dq = _evaluate(self._fast[1:], z, 1)
        return q, dq

    def rotated(self, alpha: float) -> "AnalyticDiskMap":
        """The map ``z -> f(e^{i alpha} z)`` (normalization of ``a_1`` is lost)."""
        k = np.arange(self.taylor.size)
        return _unchecked(self.taylor * np.exp(1j * alpha * k), self.role)

    def to_json(self) -> dict:
        return map_to_json(self)


def _unchecked(taylor, role):
    m = object.__new__(AnalyticDiskMap)
    t = _frozen(taylor)
    for k, v in dict(taylor=t, boundary_correspondence=None, role=role, residual=0.0,
                     tail_bound=0.0, iterations=0, orientation=1, curve=None, _fast=_trim(t)).items():
        object.__setattr__(m, k, v)
    return m


def _horner(c: np.ndarray, z: np.ndarray, order: int):
    p = np.full(z.shape, c[-1], dtype=complex)
    d1 = np.zeros(z.shape, dtype=complex)
    d2 = np.zeros(z.shape, dtype=complex)
    for a in c[-2::-1]:
        if order >= 2:
            d2 = d2 * z + d1
        if order >= 1:
            d1 = d1 * z + p
        p = p * z + a
    return (p, d1, 2.0 * d2)[: order + 1]


_ROOTS: dict = {}


def _roots(n: int) -> np.ndarray:
    if n not in _ROOTS:
        _ROOTS[n] = np.exp(2j * np.pi * np.arange(n) / n)
    return _ROOTS[n]


def _polar_radii(z: np.ndarray):
    """Radii if ``z[i, j] = r_i e^{2 pi i j / n}`` up to rounding, else None."""
    if z.ndim != 2 or z.shape[1] < 16:
        return None
    r = z[:, 0].real
    if np.any(r < 0.0):
        return None
    scale = max(1.0, float(np.max(np.abs(z))))
    if np.max(np.abs(z - r[:, None] * _roots(z.shape[1]))) > 1e-13 * scale:
        return None
    return r


def _polar(c: np.ndarray, r: np.ndarray, n: int, order: int):
    out = []
    for _ in range(order + 1):
        k = np.arange(c.size)
        with np.errstate(under="ignore"):
            b = c[None, :] * r[:, None] ** k
        m = -(-c.size // n) * n
        if m != c.size:
            b = np.concatenate([b, np.zeros((r.size, m - c.size), dtype=complex)], axis=1)
        b = b.reshape(r.size, m // n, n).sum(axis=1)
        out.append(np.fft.ifft(b, axis=1) * n)
        c = k[1:] * c[1:] if c.size > 1 else np.zeros(1, dtype=complex)
    return tuple(out)


def _evaluate(c: np.ndarray, z: np.ndarray, order: int):
    r = _polar_radii(z)
    if r is None:
        return _horner(c, z, order)
    return _polar(c, r, z.shape[1], order)


def from_taylor(coefficients, role: str = "interior", curve: ParametricCurve | None = None,
                n: int = 1024) -> AnalyticDiskMap:
    """Wrap explicit Taylor data (the solver-free entry path).

    If ``curve`` is the power-series image of the same coefficients, the
    boundary correspondence is the identity.
    """
    c = np.asarray(coefficients, dtype=complex)
    corr = None
    if curve is not None and curve.kind == "power-series-image" and not curve.inverted:
        ref = np.array(curve.coefficients)
        ref[0] += curve.shift
        if ref.size != c.size or not np.allclose(ref, c, rtol=0.0, atol=1e-14):
            raise MismatchedCurveError("curve is not the image of these coefficients")
        corr = 2.0 * np.pi * np.arange(n) / n
    return AnalyticDiskMap(c, corr, role, 0.0, 0.0, 0, 1, curve)


# --------------------------------------------------------------------------
# Theodorsen solver


def conjugate(u: np.ndarray) -> np.ndarray:
    """Circle conjugation of real samples at uniform angles (FFT)."""
    n = u.size
    uh = np.fft.fft(u)
    freq = np.fft.fftfreq(n) * n
    mult = -1j * np.sign(freq)
    if n % 2 == 0:
        mult[n // 2] = 0.0
    return np.fft.ifft(mult * uh).real


class _Polar:
    """Continuous argument of ``gamma_p(s) - c`` for the positive traversal."""

    def __init__(self, curve: ParametricCurve, center: complex, m: int):
        self.sign = 1.0 if curve.positive else -1.0
        self.curve = curve
        self.center = center
        self.grid = 2.0 * np.pi * np.arange(m + 1) / m
        z = self.point(self.grid)
        if np.min(np.abs(z)) < 1e-14:
            raise NotStarLikeError("center lies on the curve")
        lift = np.unwrap(np.angle(z))
        lift -= 2.0 * np.pi * np.floor((lift[0] + np.pi) / (2.0 * np.pi))
        if abs(lift[-1] - lift[0] - 2.0 * np.pi) > 1e-6:
            raise NotStarLikeError("curve does not wind once around the center")
        if np.any(self.dphi(self.grid) <= 0.0) or np.any(np.diff(lift) <= 0.0):
            raise NotStarLikeError("argument is not monotone along the curve (not star-like)")
        self.lift = lift
        self.ref = z

    def point(self, s):
        return self.curve.points(self.sign * np.asarray(s)) - self.center

    def dpoint(self, s):
        return self.sign * self.curve.derivative(self.sign * np.asarray(s))

    def dphi(self, s):
        return (self.dpoint(s) / self.point(s)).imag

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        turns = np.floor(s / (2.0 * np.pi))
        r = s - 2.0 * np.pi * turns
        h = self.grid[1]
        j = np.clip(np.rint(r / h).astype(int), 0, self.grid.size - 1)
        return self.lift[j] + np.angle(self.point(r) / self.ref[j]) + 2.0 * np.pi * turns

    def inverse(self, target, guess=None, iters: int = 30):
        target = np.asarray(target, dtype=float)
        if guess is None:
            turns = np.floor((target - self.lift[0]) / (2.0 * np.pi))
            rr = target - 2.0 * np.pi * turns
            guess = np.interp(rr, self.lift, self.grid) + 2.0 * np.pi * turns
        s = guess.copy()
        for _ in range(iters):
            step = (self.phi(s) - target) / self.dphi(s)
            s -= step
            if np.max(np.abs(step)) < 1e-9:
                # quadratic convergence: one more step reaches rounding level
                return s - (self.phi(s) - target) / self.dphi(s)
        return s


def solve_interior_map(c: ParametricCurve, center: complex = 0j, n: int | None = None,
                       tol: float = 1e-12, max_iter: int = 200,
                       role: str = "interior") -> AnalyticDiskMap:
    """Conformal map of the disk onto the interior of ``c`` with ``f(0) = center``.

    Parameters
    ----------
    c : ParametricCurve
        Closed, star-like with respect to ``center``.
    n : int
        Boundary nodes (power of two); Taylor data is kept up to ``n/2 - 1``.
    tol : float
        Required maximum boundary residual of the truncated series.

    Raises
    ------
    NotStarLikeError
        ``center`` outside the curve or the argument is not monotone.
    NoConvergenceError
        The fixed point stalls or the residual stays above ``tol``.
    """
    if not c.closed:
        raise SolverError("the interior map needs a closed curve")
    n = c.n if n is None else int(n)
    if n < 8 or n & (n - 1):
        raise SolverError(f"N must be a power of two >= 8, got {n}")
    center = complex(center)
    if not contains(c, center, max(n, 1024)):
        raise NotStarLikeError(f"center {center} is not inside the curve")
    polar = _Polar(c, center, 4 * n)
    t = 2.0 * np.pi * np.arange(n) / n
    s = polar.inverse(t)
    omega, prev, it = 1.0, np.inf, 0
    for it in range(1, max_iter + 1):
        logr = np.log(np.abs(polar.point(s)))
        new = polar.inverse(t + conjugate(logr), s)
        delta = float(np.max(np.abs(new - s)))
        if delta > prev and omega > 1.0 / 64:
            omega *= 0.5
        trial = s + omega * (new - s)
        if not np.all(np.diff(trial) > 0):
            # undamped steps diverge when |d log rho / d phi| exceeds 1
            omega *= 0.5
            if omega < 1.0 / 256:
                raise NoConvergenceError("boundary correspondence lost monotonicity")
            continue
        s, prev = trial, delta
        if delta < 0.1 * tol:
            break
    else:
        raise NoConvergenceError(f"no convergence after {max_iter} iterations (last step {prev:.2e})")

    b = polar.point(s) + center
    coeffs = np.fft.fft(b) / n
    taylor = coeffs[: n // 2].copy()
    taylor[0] = center
    a1 = taylor[1]
    taylor *= np.exp(-1j * np.angle(a1) * np.arange(taylor.size))
    taylor[1] = abs(a1)
    fmap = AnalyticDiskMap(taylor, s, role, 0.0, tail_estimate(_trim(taylor)), it,
                           1 if c.positive else -1, c)
    vals = _horner(taylor, np.exp(1j * t), 0)[0]
    residual = float(np.max(np.abs(vals - b)))
    if residual > tol:
        raise NoConvergenceError(
            f"boundary residual {residual:.2e} exceeds tol {tol:.0e}; increase N")
    object.__setattr__(fmap, "residual", residual)
    return fmap


def solve_exterior_via_inversion(c: ParametricCurve, n: int | None = None, tol: float = 1e-12,
                                 max_iter: int = 200) -> AnalyticDiskMap:
    """Interior map ``gt`` of ``1/gamma`` with ``gt(0) = 0``; ``|g'(inf)| = 1/gt'(0)``."""
    inverted = invert_curve(c)
    if not contains(c, 0j, max(c.n, 1024)):
        raise NotStarLikeError("the origin must lie inside the curve; recentre first")
    return solve_interior_map(inverted, 0j, n, tol, max_iter, role="inverted-exterior")


def exterior_derivative_modulus(gt: AnalyticDiskMap) -> float:
    """``|g'(infinity)|`` for ``g(z) = 1/gt(1/z)``."""
    return 1.0 / abs(gt.derivative_at_zero)


def shrink_map(fmap: AnalyticDiskMap, eps: float) -> AnalyticDiskMap:
    """``f_eps(z) = f((1 - eps) z) / (1 - eps)``, analytic on a larger disk."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if abs(fmap.taylor[0]) > 1e-14:
        raise NonzeroCenterError("the approximation family assumes f(0) = 0")
    k = np.arange(fmap.taylor.size)
    return AnalyticDiskMap(fmap.taylor * (1.0 - eps) ** (k - 1.0), None, fmap.role)


# --------------------------------------------------------------------------
# welding


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Samples at ``t_k = 2 pi k / N`` and their DFT ``fourier = fft(samples)/N``."""

    samples: np.ndarray
    fourier: np.ndarray
    lift: np.ndarray | None = None

    @classmethod
    def from_samples(cls, samples, lift=None) -> "BoundaryFunction":
        s = np.asarray(samples)
        return cls(_frozen(s, s.dtype), _frozen(np.fft.fft(s) / s.size), _frozen(lift, float))

    @property
    def angles(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.samples.size) / self.samples.size


def _curve_parameter(m: AnalyticDiskMap) -> np.ndarray:
    if m.boundary_correspondence is None:
        raise MismatchedCurveError("map carries no boundary correspondence")
    return m.orientation * np.asarray(m.boundary_correspondence)


def _same_curve(a: ParametricCurve, b: ParametricCurve) -> bool:
    return (a.kind == b.kind and a.coefficients.shape == b.coefficients.shape
            and np.array_equal(a.coefficients, b.coefficients) and a.shift == b.shift)


def welding(f: AnalyticDiskMap, gt: AnalyticDiskMap) -> BoundaryFunction:
    """Welding homeomorphism ``w = g^{-1} o f`` on the unit circle.

    ``theta_f`` and ``theta_g(t) = theta_gt(-t)`` are the correspondences
    of ``f`` and ``g`` against the common parameter of the curve; their
    composition ``theta_g^{-1} o theta_f`` is interpolated with a monotone
    cubic on the periodically extended lifts.
    """
    if f.curve is None or gt.curve is None:
        raise MismatchedCurveError("both maps must come from solved curves")
    if not _same_curve(f.curve, gt.curve) or f.curve.inverted == gt.curve.inverted:
        raise MismatchedCurveError("maps were solved for different curves")
    tf = _curve_parameter(f)
    tgt = _curve_parameter(gt)
    n = tgt.size
    t = 2.0 * np.pi * np.arange(n) / n
    # theta_g(t) = theta_gt(-t): reindex the samples at -t_k = t_{n-k}
    idx = (-np.arange(n)) % n
    tg = tgt[idx] - 2.0 * np.pi * (np.arange(n) > 0) * np.sign(tgt[-1] - tgt[0])
    sgn = np.sign(tg[-1] - tg[0])
    if sgn == 0 or np.any(np.diff(sgn * tg) <= 0):
        raise MismatchedCurveError("exterior correspondence is not monotone")
    ext = np.concatenate([t - 2 * np.pi, t, t + 2 * np.pi])
    vals = np.concatenate([tg - sgn * 2 * np.pi, tg, tg + sgn * 2 * np.pi])
    inv = PchipInterpolator(sgn * vals, ext)
    tf = tf - sgn * 2.0 * np.pi * math.floor(sgn * (tf[0] - tg[0]) / (2.0 * np.pi))
    tau = inv(sgn * tf)
    tau = tau - 2.0 * np.pi * math.floor(tau[0] / (2.0 * np.pi) + 0.5)
    return BoundaryFunction.from_samples(np.exp(1j * tau), lift=tau)


def log_derivative(w: BoundaryFunction) -> BoundaryFunction:
    """``log w'`` from the lift by spectral differentiation of ``tau(t) - t``."""
    if w.lift is None:
        raise ValueError("need the lift of the homeomorphism")
    n = w.lift.size
    t = 2.0 * np.pi * np.arange(n) / n
    p = w.lift - t
    k = np.fft.fftfreq(n) * n
    ph = np.fft.fft(p)
    dk = 1j * k
    dk[n // 2] = 0.0
    dtau = 1.0 + np.fft.ifft(dk * ph).real
    if np.any(dtau <= 0):
        raise SolverError("welding derivative is not positive")
    return BoundaryFunction.from_samples(np.log(dtau))


# --------------------------------------------------------------------------
# map exchange


def map_to_json(m: AnalyticDiskMap) -> dict:
    return {
        "role": m.role,
        "taylor": [[float(a.real), float(a.imag)] for a in m.taylor],
        "normalization": {"a0": [m.center.real, m.center.imag], "a1_real_positive": m.real_positive},
        "residual": m.residual,
        "tail_bound": m.tail_bound,
        "iterations": m.iterations,
        "orientation": m.orientation,
        "boundary_correspondence": (None if m.boundary_correspondence is None
                                    else [float(v) for v in m.boundary_correspondence]),
        "curve": None if m.curve is None else m.curve.to_json(),
    }


def map_from_json(doc: dict) -> AnalyticDiskMap:
    from .geometry import curve_from_json

    taylor = [complex(a, b) for a, b in doc["taylor"]]
    curve = curve_from_json(doc["curve"]) if doc.get("curve") else None
    return AnalyticDiskMap(taylor, doc.get("boundary_correspondence"), doc.get("role", "interior"),
                           float(doc.get("residual", 0.0)), float(doc.get("tail_bound", 0.0)),
                           int(doc.get("iterations", 0)), int(doc.get("orientation", 1)), curve)
