"""Arithmetic on the circle represented as [0, 1) with addition mod 1.

Group elements are plain floats (or float arrays) in [0, 1).  ``frac`` is the
total reduction map; every operation routes through it so results always land
back in [0, 1), including the rounding corner case where ``x - floor(x)``
evaluates to exactly 1.0 for tiny negative ``x``.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["frac", "frac_scalar", "torus_add", "torus_neg", "circle_dist"]


def frac_scalar(x: float) -> float:
    """Fractional part of a scalar, guaranteed in [0, 1)."""
    f = x - math.floor(x)
    if f >= 1.0:
        f -= 1.0
    return f + 0.0  # normalize -0.0


def frac(x):
    """Elementwise fractional part, guaranteed in [0, 1).

    Accepts scalars or arrays; scalar input returns a Python float.
    """
    if np.isscalar(x) or isinstance(x, float):
        return frac_scalar(float(x))
    x = np.asarray(x, dtype=np.float64)
    f = x - np.floor(x)
    return np.where(f >= 1.0, f - 1.0, f) + 0.0


def torus_add(a, b):
    """Group operation: (a + b) mod 1."""
    if np.isscalar(a) and np.isscalar(b):
        return frac_scalar(a + b)
    return frac(np.asarray(a, dtype=np.float64) + np.asarray(b, dtype=np.float64))


def torus_neg(a):
    """Group inverse: (1 - a) mod 1."""
    if np.isscalar(a):
        return frac_scalar(1.0 - a)
    return frac(1.0 - np.asarray(a, dtype=np.float64))


def circle_dist(a, b):
    """Quotient metric on the circle: min over m of |a - b + m|, in [0, 1/2]."""
    d = frac(np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64))
    d = np.minimum(d, 1.0 - d)
    if d.ndim == 0:
        return float(d)
    return d
