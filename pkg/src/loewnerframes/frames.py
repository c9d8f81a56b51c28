"""Harmonic moving frames built from a conformal map, and their identities.

For a univalent ``f`` on the disk the frame on the spherical image is

    chi = conj(z f') / |z f'|,    psi(w) = (1 - w^2, i(1 + w^2), 2w) / (1 + |w|^2),
    phi = chi * psi(f),           u = Im phi,   v = Re phi,   n = pi^{-1}(f),

with conformal factor ``mu = log|f'| - log(1 + |f|^2) + log 2``.  The
pairing ``<a, b>`` is the bilinear (not Hermitian) extension of the dot
product.  All z-derivatives of ``f`` come from the Taylor data; finite
differences appear only in the Laplacian residuals of ``mu`` and ``phi``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conformal import R_MAX, AnalyticDiskMap
from .errors import OriginInputError, OutOfRadiusError, VanishingDerivativeError
from .geometry import SpherePoint, inverse_stereographic
from .quadrature import DiskQuadrature, default_rule, integrate_disk, sobolev_seminorm

ORIGIN_EXCLUSION = 1e-6
LOG2 = math.log(2.0)


def pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bilinear pairing over the last axis."""
    return np.sum(a * b, axis=-1)


def _eval(f: AnalyticDiskMap, z, r_max: float = R_MAX):
    fz, f1, f2 = f.eval(z, 2, r_max)
    if np.any(np.abs(f1) < 1e-14 * abs(f.derivative_at_zero)):
        raise VanishingDerivativeError("f' vanishes at a requested point")
    return fz, f1, f2


def mu_of(f: AnalyticDiskMap, z, r_max: float = R_MAX):
    """Conformal factor ``log|f'| - log(1 + |f|^2) + log 2``."""
    fz, f1 = f.eval(z, 1, r_max)
    if np.any(np.abs(f1) == 0.0):
        raise VanishingDerivativeError("f' vanishes at a requested point")
    return np.log(np.abs(f1)) - np.log1p(np.abs(fz) ** 2) + LOG2


def psi_vector(w) -> np.ndarray:
    """Null vector ``psi(w)``, shape ``w.shape + (3,)``."""
    w = np.asarray(w, dtype=complex)
    d = 1.0 + np.abs(w) ** 2
    return np.stack([1.0 - w**2, 1j * (1.0 + w**2), 2.0 * w], axis=-1) / d[..., None]


@dataclass(frozen=True)
class FrameFields:
    """Vectorized frame data at points ``z`` (vectors on the last axis)."""

    z: np.ndarray
    f: np.ndarray
    df: np.ndarray
    d2f: np.ndarray
    chi: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    dbar_phi: np.ndarray
    mu: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return self.phi.imag

    @property
    def v(self) -> np.ndarray:
        return self.phi.real

    @property
    def n(self) -> np.ndarray:
        return inverse_stereographic(self.f)

    @property
    def dv(self) -> np.ndarray:
        """``d/dz`` of ``v = (phi + conj(phi))/2``."""
        return 0.5 * (self.dphi + np.conj(self.dbar_phi))

    @property
    def cartan(self) -> np.ndarray:
        """``<u, d/dz v>``."""
        return pair(self.u, self.dv)

    @property
    def conformal_density(self) -> np.ndarray:
        """``e^{2 mu} = 4|f'|^2 / (1 + |f|^2)^2``."""
        return np.exp(2.0 * self.mu)


def frame_fields(f: AnalyticDiskMap, z, branch: int = 1, r_max: float = R_MAX) -> FrameFields:
    """Frames and their analytic z-derivatives at ``z`` (``z != 0``).

    ``branch = -1`` takes the other square root ``-chi`` of
    ``conj(z f')/(z f')``; the frame flips sign and the Cartan form does not.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) < ORIGIN_EXCLUSION):
        raise OriginInputError("the frame is undefined at the marked point z = 0")
    fz, f1, f2 = _eval(f, z, r_max)
    zf = z * f1
    chi = branch * np.conj(zf) / np.abs(zf)
    m = 1.0 + np.abs(fz) ** 2
    num = np.stack([1.0 - fz**2, 1j * (1.0 + fz**2), 2.0 * fz], axis=-1)
    dnum = np.stack([-2.0 * fz, 2j * fz, 2.0 * np.ones_like(fz)], axis=-1)
    psi = num / m[..., None]
    dpsi = dnum * (f1 / m)[..., None] - num * (f1 * np.conj(fz) / m**2)[..., None]
    dbar_psi = -num * (fz * np.conj(f1) / m**2)[..., None]
    lp = 1.0 / z + f2 / f1
    dchi = -0.5 * lp * chi
    dbar_chi = 0.5 * np.conj(lp) * chi
    phi = chi[..., None] * psi
    dphi = dchi[..., None] * psi + chi[..., None] * dpsi
    dbar_phi = dbar_chi[..., None] * psi + chi[..., None] * dbar_psi
    mu = np.log(np.abs(f1)) - np.log(m) + LOG2
    return FrameFields(z, fz, f1, f2, chi, psi, phi, dphi, dbar_phi, mu)


def cartan_form(f: AnalyticDiskMap, z, branch: int = 1) -> np.ndarray:
    """``<u, d/dz v>`` from the frame vectors."""
    return frame_fields(f, z, branch).cartan


def modified_preschwarzian(fz, f1, f2):
    """``f''/f' - 2 f' conj(f) / (1 + |f|^2)``."""
    return f2 / f1 - 2.0 * f1 * np.conj(fz) / (1.0 + np.abs(fz) ** 2)


def cartan_residual(f: AnalyticDiskMap, z) -> np.ndarray:
    """``<u, d/dz v> + (i/2)(f''/f' - 2 f' conj f/(1+|f|^2) + 1/z)``; zero in exact arithmetic."""
    ff = frame_fields(f, z)
    return ff.cartan + 0.5j * (modified_preschwarzian(ff.f, ff.df, ff.d2f) + 1.0 / ff.z)


def orthonormality_residual(ff: FrameFields) -> np.ndarray:
    """Worst deviation from an orthonormal triple at each point."""
    u, v, n = ff.u, ff.v, ff.n
    parts = [np.abs(np.linalg.norm(a, axis=-1) - 1.0) for a in (u, v, n)]
    parts += [np.abs(pair(a, b)) for a, b in ((u, v), (u, n), (v, n))]
    return np.max(np.stack(parts), axis=0)


def _stencil(z, h, r_max, inner: float = 0.0):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) + h > r_max):
        raise OutOfRadiusError("finite-difference stencil leaves the evaluation disk")
    if inner and np.any(np.abs(z) < inner):
        raise OriginInputError("stencil too close to the marked point z = 0")
    return z


def _laplacian(F, z, h):
    return (F(z + h) + F(z - h) + F(z + 1j * h) + F(z - 1j * h) - 4.0 * F(z)) / h**2


def liouville_residual(f: AnalyticDiskMap, z, h: float, r_max: float = R_MAX) -> np.ndarray:
    """Five-point ``Delta mu + e^{2 mu}`` at the points ``z``; ``O(h^2)``."""
    z = _stencil(z, h, r_max)
    return _laplacian(lambda p: mu_of(f, p, r_max), z, h) + np.exp(2.0 * mu_of(f, z, r_max))


def harmonicity_pairings(f: AnalyticDiskMap, z, h: float, r_max: float = R_MAX):
    """``<Delta phi, phi>`` and ``<Delta phi, conj phi>`` with a five-point Laplacian."""
    z = _stencil(z, h, r_max, inner=10.0 * h)
    lap = _laplacian(lambda p: frame_fields(f, p, r_max=r_max).phi, z, h)
    phi = frame_fields(f, z, r_max=r_max).phi
    return pair(lap, phi), pair(lap, np.conj(phi))


def harmonicity_residuals(f: AnalyticDiskMap, z, h: float, r_max: float = R_MAX):
    """``Im<Delta phi, phi>`` and ``Im<Delta phi, conj phi>``."""
    a, b = harmonicity_pairings(f, z, h, r_max)
    return a.imag, b.imag


@dataclass(frozen=True)
class FrameSample:
    z: complex
    u: SpherePoint
    v: SpherePoint
    n: SpherePoint
    mu: float
    cartan: complex
    residuals: dict = field(default_factory=dict)


def frame_at(f: AnalyticDiskMap, z: complex, h: float = 1e-3) -> FrameSample:
    """Frame at one point with all residuals.

    Finite-difference residuals are ``nan`` where the stencil does not fit.
    """
    ff = frame_fields(f, np.array([z]))
    res = {
        "orthonormality": float(orthonormality_residual(ff)[0]),
        "cartan": float(abs(ff.cartan[0] + 0.5j * (modified_preschwarzian(ff.f, ff.df, ff.d2f)[0] + 1.0 / z))),
    }
    try:
        res["liouville"] = float(abs(liouville_residual(f, np.array([z]), h)[0]))
        a, b = harmonicity_residuals(f, np.array([z]), h)
        res["harmonicity_phi"] = float(abs(a[0]))
        res["harmonicity_phibar"] = float(abs(b[0]))
    except (OutOfRadiusError, OriginInputError):
        res.update(liouville=math.nan, harmonicity_phi=math.nan, harmonicity_phibar=math.nan)
    return FrameSample(complex(z), SpherePoint(*ff.u[0]), SpherePoint(*ff.v[0]),
                       SpherePoint(*ff.n[0]), float(ff.mu[0]), complex(ff.cartan[0]), res)


def dirichlet_energy(f: AnalyticDiskMap, rule: DiskQuadrature | None = None) -> float:
    """``int_D |grad mu|^2`` with ``|grad mu|^2 = |f''/f' - 2 f' conj f/(1+|f|^2)|^2``."""
    rule = rule or default_rule()

    def integrand(z):
        return np.abs(modified_preschwarzian(*f.eval(z, 2, 1.0))) ** 2

    return integrate_disk(integrand, rule)


# --------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureTrace:
    angles: np.ndarray
    k: np.ndarray
    sobolev_minus_half: float


def geodesic_curvature(f: AnalyticDiskMap, z) -> np.ndarray:
    """``Re(z f''/f' - 2 z f' conj f/(1+|f|^2)) + 1``: the spherical curvature of ``f(|z| = r)``."""
    fz, f1, f2 = _eval(f, z)
    return (np.asarray(z) * modified_preschwarzian(fz, f1, f2)).real + 1.0


def geodesic_curvature_disk(f: AnalyticDiskMap, n_theta: int = 1024,
                            r_eval: float = 1.0 - 1e-6) -> CurvatureTrace:
    if not 0.0 < r_eval <= R_MAX:
        raise OutOfRadiusError(f"r_eval must lie in (0, {R_MAX}]")
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    k = geodesic_curvature(f, r_eval * np.exp(1j * theta))
    return CurvatureTrace(theta, k, sobolev_seminorm(k, -0.5))


def geodesic_curvature_halfplane(preschwarzian) -> np.ndarray:
    """Curvature ``Im(f''/f')`` of the image of the real line."""
    return np.asarray(preschwarzian).imag


def neumann_residual(f: AnalyticDiskMap, n_theta: int = 256, r_eval: float = 0.999,
                     h: float = 1e-4) -> np.ndarray:
    """``r d mu/dr - (k - 1)`` on the circle ``|z| = r_eval`` (central difference)."""
    if r_eval + h > R_MAX or r_eval - h <= 0.0:
        raise OutOfRadiusError("radial stencil leaves the evaluation disk")
    e = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    dmu = (mu_of(f, (r_eval + h) * e) - mu_of(f, (r_eval - h) * e)) / (2.0 * h)
    return r_eval * dmu - (geodesic_curvature(f, r_eval * e) - 1.0)


# --------------------------------------------------------------------------
# spiral example


def spiral_map(z):
    """``z exp(i log log z)`` on the upper half-disk (principal branches)."""
    z = np.asarray(z, dtype=complex)
    return z * np.exp(1j * np.log(np.log(z)))


def spiral_preschwarzian(z):
    """``f''/f' = i(log z - 1 + i) / (z log z (log z + i))``."""
    z = np.asarray(z, dtype=complex)
    lz = np.log(z)
    return 1j * (lz - 1.0 + 1j) / (z * lz * (lz + 1j))


def spiral_integrand(z):
    """``|f''/f'|^2`` in polar form ``l = log|z|``, ``a = arg z``."""
    z = np.asarray(z, dtype=complex)
    l, a = np.log(np.abs(z)), np.angle(z)
    return ((l - 1.0) ** 2 + (1.0 + a) ** 2) / (np.abs(z) ** 2 * (l**2 + a**2) * (l**2 + (1.0 + a) ** 2))


def spiral_curvature(t):
    """Curvature of the spiral image of ``(0, 1)``: ``-1/(t(1 + log^2 t)) + 1/(t log t)``."""
    t = np.asarray(t, dtype=float)
    lt = np.log(t)
    return -1.0 / (t * (1.0 + lt**2)) + 1.0 / (t * lt)


SPIRAL_BOUND = 4.0 * math.pi / LOG2 + 4.0 * math.pi / (3.0 * LOG2**2)


def spiral_diagnostics(eps: float = 0.5, core: float = 1e-8, panels: int = 24,
                       n_gauss: int = 24) -> float:
    """``int |f''/f'|^2`` over ``{core < |z| < eps, Im z > 0}``.

    Uses ``s = log r`` so ``r^2 |f''/f'|^2`` is smooth; Gauss-Legendre in
    ``s`` (panels graded toward ``log eps``) and in the angle.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    x, w = np.polynomial.legendre.leggauss(n_gauss)
    lo, hi = math.log(core), math.log(eps)
    # geometric grading in distance from hi, where the integrand varies fastest
    span = hi - lo
    edges = hi - span * (np.geomspace(1e-3, 1.0, panels) - 1e-3) / (1.0 - 1e-3)
    edges = np.unique(np.r_[edges, lo])
    a, b = edges[:-1, None], edges[1:, None]
    s = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    ws = (0.5 * (b - a) * w).ravel()
    ang_panels = np.linspace(0.0, math.pi, 9)
    aa, bb = ang_panels[:-1, None], ang_panels[1:, None]
    al = (0.5 * (bb - aa) * x + 0.5 * (aa + bb)).ravel()
    wa = (0.5 * (bb - aa) * w).ravel()
    r = np.exp(s)
    z = np.multiply.outer(r, np.exp(1j * al))
    vals = np.abs(spiral_preschwarzian(z)) ** 2 * (r**2)[:, None]
    return math.fsum(np.multiply.outer(ws, wa).ravel() * vals.ravel())


# --------------------------------------------------------------------------
# CSV output


def write_frames_csv(path, f: AnalyticDiskMap, z, comment: str | None = None) -> Path:
    """One row per node: position, frame vectors, mu and residuals.

    ``comment`` is written first as a ``#`` line (provenance stamp).
    """
    z = np.asarray(z, dtype=complex).ravel()
    ff = frame_fields(f, z)
    cres = np.abs(ff.cartan + 0.5j * (modified_preschwarzian(ff.f, ff.df, ff.d2f) + 1.0 / z))
    ortho = orthonormality_residual(ff)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        wr = csv.writer(fh)
        wr.writerow(["re_z", "im_z", "ux", "uy", "uz", "vx", "vy", "vz", "nx", "ny", "nz",
                     "mu", "re_cartan", "im_cartan", "orthonormality", "cartan_residual"])
        for i in range(z.size):
            wr.writerow([z[i].real, z[i].imag, *ff.u[i], *ff.v[i], *ff.n[i], ff.mu[i],
                         ff.cartan[i].real, ff.cartan[i].imag, ortho[i], cres[i]])
    return path


def write_curvature_csv(path, trace: CurvatureTrace, comment: str | None = None) -> Path:
    """Curvature samples ``(theta, k)``, one row per angle."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        wr = csv.writer(fh)
        wr.writerow(["theta", "k"])
        wr.writerows(zip(trace.angles.tolist(), trace.k.tolist()))
    return path
