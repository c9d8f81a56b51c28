"""Independent reference values, computed with mpmath at 30 digits.

The numbers printed here are frozen into ``tests/oracles.py``.  None of
them uses the package's quadrature or conformal solver.

    python3 scripts/compute_oracles.py
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 30


def preschwarzian_norm_poly(eps: float, n: int, terms: int = 400) -> mp.mpf:
    """``int_D |f''/f'|^2`` for ``f = z + eps z^n`` from its power series.

    ``f''/f' = eps n (n-1) z^(n-2) / (1 + eps n z^(n-1))``; the disk integral of
    ``|sum c_k z^k|^2`` is ``pi sum |c_k|^2 / (k+1)``.
    """
    a = mp.mpf(eps) * n
    total = mp.mpf(0)
    for j in range(terms):
        k = (n - 2) + j * (n - 1)
        c = a * (n - 1) * (-a) ** j
        total += c**2 / (k + 1)
    return mp.pi * total


def ellipse_exterior(rho: float, terms: int = 200) -> mp.mpf:
    """Laurent-series value of ``int_{|z|>1} |g''/g'|^2`` for ``g = z + rho/z``."""
    r = mp.mpf(rho)
    return mp.fsum(4 * r ** (2 * k + 2) * 2 * mp.pi / (4 * k + 4) for k in range(terms))


def log_area_scaled(s: float) -> mp.mpf:
    """``int_D log|z| 8|h'|^2/(1+|h|^2)^2`` for ``h = s z``."""
    s = mp.mpf(s)
    return mp.quad(lambda r: mp.log(r) * 8 * s**2 / (1 + s**2 * r**2) ** 2 * 2 * mp.pi * r, [0, 0.5, 1])


def spiral_integral(eps: float, core: float = 1e-8) -> mp.mpf:
    """``int |f''/f'|^2`` over ``{core < |z| < eps, Im z > 0}`` in log-polar form."""

    def integrand(s, a):
        l = s
        return ((l - 1) ** 2 + (1 + a) ** 2) / ((l**2 + a**2) * (l**2 + (1 + a) ** 2))

    lo, hi = mp.log(core), mp.log(eps)
    return mp.quad(integrand, [lo, -10, -3, hi], [0, mp.pi / 2, mp.pi])


def main() -> None:
    print("PRESCHWARZIAN_POLY = {")
    for eps, n in ((0.05, 2), (0.1, 3)):
        print(f"    ({eps}, {n}): {mp.nstr(preschwarzian_norm_poly(eps, n), 20)},")
    print("}")
    for rho in (0.1, 0.2, 0.3):
        print(f"ELLIPSE_EXTERIOR[{rho}] = {mp.nstr(ellipse_exterior(rho), 20)}"
              f"  # closed form {mp.nstr(-2 * mp.pi * mp.log(1 - mp.mpf(rho) ** 2), 20)}")
    print(f"LOG_AREA_2Z = {mp.nstr(log_area_scaled(2), 20)}")
    for eps in (0.5, 0.1):
        print(f"SPIRAL[{eps}] = {mp.nstr(spiral_integral(eps), 20)}")


if __name__ == "__main__":
    main()
