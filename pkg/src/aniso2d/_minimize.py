"""Scalar minimization helpers (golden-section search)."""
from __future__ import annotations

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_min(fn, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200):
    """Golden-section minimum of a unimodal ``fn`` on ``[lo, hi]``.

    Returns ``(x, fn(x))``.  With a non-unimodal function the result is a
    local minimum inside the bracket, which is all the callers need (they
    bracket a single dip first).
    """
    a, b = float(lo), float(hi)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, fn(x)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = fn(d)
    x = c if fc < fd else d
    return x, min(fc, fd)
