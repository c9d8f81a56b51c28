"""Loewner energy of Jordan curves via conformal maps and harmonic moving frames."""

from __future__ import annotations

__version__ = "0.1.0"

__all__ = ["__version__"]
