"""Quadrature building blocks for endpoint-singular periodic integrals.

Three rule factories, all returning ``(nodes, weights)`` pairs:

* :func:`graded_rule` -- Gauss-Legendre transplanted through the grading
  ``t = delta * u**q`` onto ``(0, delta]``, which absorbs an algebraic
  endpoint singularity ``t**mu`` at 0 (choose ``q`` so ``q*(1+mu) >= 3``).
  The singular factor can be fused into the weights *in log space* so that
  extreme gradings (very large ``q``) never underflow to ``0 * inf``.
* :func:`panel_rule` -- composite Gauss-Legendre on a smooth interval.
* :func:`dyadic_panels` -- geometrically shrinking panels toward one
  endpoint, for integrands that are smooth inside but only Holder at the
  end (e.g. profile densities vanishing like a fractional power).
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "graded_rule",
    "graded_rule_power",
    "panel_rule",
    "dyadic_panels",
]


def graded_rule(delta: float, q: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``integral_0^delta f(t) dt`` via ``t = delta*u**q``.

    The returned weights contain the Jacobian ``delta*q*u**(q-1)``; the
    integrand is evaluated as given.  Suitable when ``f`` has an integrable
    algebraic singularity at 0 and ``q`` was chosen to smooth it out.
    """
    u, wu = leggauss(n)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    t = delta * u**q
    w = wu * delta * q * u ** (q - 1.0)
    return t, w


def graded_rule_power(
    delta: float, q: float, n: int, mu: float
) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`graded_rule` but with the singular factor ``t**mu`` fused
    into the weights, computed in log space.

    Returns ``(t, w)`` such that ``sum(w * g(t))`` approximates
    ``integral_0^delta t**mu * g(t) dt`` for smooth ``g``.  Fusing in log
    space matters when ``q`` is huge (gradings like ``q = 2/s`` for tiny
    ``s``): the separate factors ``u**(q-1)`` and ``t**mu`` under/overflow
    even though their product is moderate (the combined exponent
    ``q*(1+mu) - 1`` is positive by construction).
    """
    u, wu = leggauss(n)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    t = delta * u**q
    log_w = (
        np.log(wu)
        + np.log(delta * q)
        + (q * (1.0 + mu) - 1.0) * np.log(u)
        + mu * np.log(delta)
    )
    return t, np.exp(log_w)


def panel_rule(
    a: float, b: float, n_panels: int, n_nodes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on ``[a, b]``."""
    x, w = leggauss(n_nodes)
    edges = np.linspace(a, b, n_panels + 1)
    los, his = edges[:-1], edges[1:]
    half = 0.5 * (his - los)
    mids = 0.5 * (his + los)
    nodes = (mids[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def dyadic_panels(
    a: float, b: float, toward: float, n_levels: int, n_nodes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre panels on ``[a, b]`` shrinking geometrically (factor 2)
    toward the endpoint ``toward`` (which must be ``a`` or ``b``).

    The innermost panel is left half-open: its width is the last dyadic
    fraction, so an integrable endpoint singularity contributes an error of
    order ``2**(-n_levels*(1+mu))``.
    """
    if toward not in (a, b):
        raise ValueError("`toward` must be one of the interval endpoints")
    length = b - a
    # distances from the crowded endpoint: L, L/2, ..., L*2^-n_levels, 0
    dists = [length * 2.0 ** (-k) for k in range(n_levels + 1)] + [0.0]
    if toward == b:
        edges = np.sort(np.asarray([b - d for d in dists]))
    else:
        edges = np.sort(np.asarray([a + d for d in dists]))
    x, w = leggauss(n_nodes)
    nodes_list = []
    weights_list = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes_list.append(mid + half * x)
        weights_list.append(half * w)
    return np.concatenate(nodes_list), np.concatenate(weights_list)
