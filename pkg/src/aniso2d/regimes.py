"""Admissibility classification and critical coupling strengths.

For the parametrized family ``Omega = 1 + alpha * omega`` (``alpha * omega``
on the logarithmic branch) the transformed profile stays nonnegative — the
condition for ellipse minimizers — exactly up to a critical coupling:

    alpha_L  = -1 / min(omega_unit)      (first sign change anywhere)
    alpha_L0 = -1 / omega_unit(0)        (sign change along the first axis)

where ``omega_unit`` is the transform of ``omega`` normalized so that the
profile transform reads ``const * (1 + alpha * omega_unit)``.  Between the
two criticals the profile is negative somewhere but not along the first
axis; past ``alpha_L0`` even the axis direction turns negative and the
minimizer concentrates.  For ``1 <= s < 2`` the transform of any positive
profile is positive, so the admissible regime never ends.

The reported minima are refined from the best grid node by golden-section
search on the trigonometric interpolant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import BranchError, InvalidInputError
from ._minimize import golden_min
from .anglefn import AngleFunction, PotentialSpec, forward_transform, log_transform
from .specfun import riesz_constants

__all__ = [
    "LicResult",
    "RegimeReport",
    "is_lic",
    "critical_alphas",
    "zigzag_angle",
    "classify",
]

_MIN_TOL = 1e-10  # relative tolerance for sign decisions on the grid
_TIE_TOL = 1e-9   # relative window for "this node also attains the minimum"
_KAPPA_DEGENERATE = 2.5


@dataclass(frozen=True)
class LicResult:
    """Admissibility verdict with its witness."""

    holds: bool
    omega_tilde_min: float
    argmin_phi: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class RegimeReport:
    """Classification of a spec against the critical couplings."""

    s: float
    alpha: float | None
    alpha_L: float | None
    alpha_L0: float | None
    regime: str
    omega_tilde_min: float
    argmin_phi: float
    zigzag_angle: float | None
    alpha_star: None
    alpha_star_lower_bound: float | None
    rho1d_never_minimizer: bool
    degeneracy_order: float | None
    argmin_set: tuple

    def to_json_dict(self) -> dict:
        return {
            "s": self.s,
            "alpha": self.alpha,
            "alpha_L": self.alpha_L,
            "alpha_L0": self.alpha_L0,
            "regime": self.regime,
            "omega_tilde_min": self.omega_tilde_min,
            "argmin_phi": self.argmin_phi,
            "zigzag_angle": self.zigzag_angle,
            "alpha_star": self.alpha_star,
            "alpha_star_lower_bound": self.alpha_star_lower_bound,
            "rho1d_never_minimizer": self.rho1d_never_minimizer,
            "degeneracy_order": self.degeneracy_order,
            "argmin_set": list(self.argmin_set),
        }


def _refine_cluster_min(fn: AngleFunction, x0: float, h: float) -> tuple[float, float]:
    """Minimum of the interpolant near ``x0``: golden-section bracket, then
    Newton steps on the spectral derivative (golden section alone stalls at
    sqrt(eps) in the abscissa)."""
    x, v = golden_min(fn.eval, x0 - 1.5 * h, x0 + 1.5 * h, tol=1e-12)
    for _ in range(4):
        d = float(fn.eval_derivative(x))
        dh = 1e-6
        d2 = (float(fn.eval_derivative(x + dh)) - float(fn.eval_derivative(x - dh))) / (2.0 * dh)
        if not (d2 > 0.0) or not math.isfinite(d):
            break
        step = d / d2
        if abs(step) > h:
            break
        x -= step
        if abs(step) < 1e-15 * max(1.0, abs(x)):
            break
    v = min(v, float(fn.eval(x)))
    return x, v


def _refined_min(fn: AngleFunction) -> tuple[float, float]:
    """(argmin, min) of the interpolant, seeded at the best grid node."""
    idx = int(np.argmin(fn.values))
    h = math.pi / fn.n
    x, v = _refine_cluster_min(fn, idx * h, h)
    grid_v = float(fn.values[idx])
    if grid_v < v:
        x, v = idx * h, grid_v
    return x % math.pi, v


def _canonical_angle(phi: float, symmetric: bool) -> float:
    phi = phi % math.pi
    if symmetric and phi > math.pi / 2.0:
        phi = math.pi - phi
    if phi < 1e-11 or abs(phi - math.pi) < 1e-11:
        phi = 0.0
    return phi


def _min_witness(fn: AngleFunction) -> tuple[float, float]:
    phi, v = _refined_min(fn)
    return _canonical_angle(phi, fn.symmetric), v


def is_lic(spec: PotentialSpec) -> LicResult:
    """Whether ellipse states can be minimizers: the transform must be >= 0."""
    tilde = spec.omega_tilde()
    scale = max(float(np.max(np.abs(tilde.values))), 1e-300)
    phi, vmin = _min_witness(tilde)
    return LicResult(
        holds=vmin >= -_MIN_TOL * scale,
        omega_tilde_min=vmin,
        argmin_phi=phi,
    )


def _unit_perturbation_transform(spec: PotentialSpec) -> AngleFunction:
    """Transform of ``omega`` normalized so the profile transform is
    ``const * (1 + alpha * result)``."""
    if spec.logarithmic:
        lt = log_transform(spec.omega)
        vals = 2.0 * math.pi * lt.values - 1.0
        return AngleFunction(vals, symmetric=lt.symmetric)
    t = forward_transform(spec.omega, spec.s)
    c_s = riesz_constants(spec.s).c_s
    return AngleFunction(t.values / c_s, symmetric=t.symmetric)


def _require_parametrized(spec: PotentialSpec, what: str):
    if spec.mode != "parametrized":
        raise InvalidInputError(f"{what} needs a parametrized spec")
    if not (spec.logarithmic or 0.0 < spec.s < 1.0):
        raise BranchError(
            f"{what} is defined for 0 < s < 1 or the logarithmic branch "
            f"(got s={spec.s})"
        )


def critical_alphas(spec: PotentialSpec) -> tuple[float, float]:
    """``(alpha_L, alpha_L0)`` for the parametrized family of ``spec``."""
    _require_parametrized(spec, "critical_alphas")
    wt = _unit_perturbation_transform(spec)
    scale = max(float(np.max(np.abs(wt.values))), 1e-300)
    _, vmin = _min_witness(wt)
    alpha_l = math.inf if vmin >= -_MIN_TOL * scale else -1.0 / vmin
    w0 = float(wt.values[0])
    alpha_l0 = math.inf if w0 >= -_MIN_TOL * scale else -1.0 / w0
    return alpha_l, alpha_l0


def _argmin_set(fn: AngleFunction) -> tuple[float, ...]:
    """All grid angles attaining the minimum (within a relative window),
    clustered and refined; canonicalized and sorted ascending."""
    vals = fn.values
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    vmin = float(np.min(vals))
    idx = np.flatnonzero(vals <= vmin + _TIE_TOL * scale)
    n = fn.n
    h = math.pi / n
    clusters = []
    current = [int(idx[0])]
    for i in idx[1:]:
        if int(i) == current[-1] + 1:
            current.append(int(i))
        else:
            clusters.append(current)
            current = [int(i)]
    clusters.append(current)
    if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == n - 1:
        clusters[0] = clusters.pop() + clusters[0]
    refined = []
    for cluster in clusters:
        mid = cluster[len(cluster) // 2]
        x, _ = _refine_cluster_min(fn, mid * h, h)
        refined.append(_canonical_angle(x, fn.symmetric))
    refined.sort()
    merged: list[list[float]] = []
    for x in refined:
        if merged and x - merged[-1][-1] < 1e-7:
            merged[-1].append(x)
        else:
            merged.append([x])
    return tuple(sum(group) / len(group) for group in merged)


def zigzag_angle(spec: PotentialSpec) -> float | None:
    """Predicted off-axis escape direction: the argmin of the normalized
    perturbation transform, or ``None`` when that argmin sits at 0 (ties
    break toward the smallest angle)."""
    _require_parametrized(spec, "zigzag_angle")
    wt = _unit_perturbation_transform(spec)
    angles = _argmin_set(wt)
    smallest = angles[0]
    if smallest == 0.0:
        return None
    return smallest


def _degeneracy_order(omega: AngleFunction) -> float | None:
    """Order of vanishing of ``omega`` at pi/2 by a log-log slope fit."""
    hs = np.geomspace(0.01, 0.2, 12)
    vals = omega.eval(math.pi / 2.0 - hs)
    scale = max(float(np.max(np.abs(omega.values))), 1e-300)
    if np.any(vals <= 1e-14 * scale):
        return math.inf  # vanishes identically (to precision) near pi/2
    slope = np.polyfit(np.log(hs), np.log(vals), 1)[0]
    return float(slope)


def classify(spec: PotentialSpec) -> RegimeReport:
    """Assemble the full regime report for ``spec``.

    The regime label is decided from the sign pattern of the transformed
    profile (minimum overall, value along the first axis), which for
    parametrized specs coincides with comparing ``alpha`` against the
    critical couplings.
    """
    tilde = spec.omega_tilde()
    scale = max(float(np.max(np.abs(tilde.values))), 1e-300)
    argmin_phi, vmin = _min_witness(tilde)
    v0 = float(tilde.values[0])
    parametrized = spec.mode == "parametrized"
    flow_branch = spec.logarithmic or 0.0 < spec.s < 1.0

    if spec.s >= 1.0:
        regime = "always_LIC"
    elif vmin >= -_MIN_TOL * scale:
        regime = "LIC_ellipse"
    elif v0 >= -_MIN_TOL * scale:
        regime = "nonLIC_no_vertical"
    else:
        regime = "nonLIC_concentrating"

    alpha_l = alpha_l0 = None
    if parametrized:
        if spec.s >= 1.0:
            alpha_l = alpha_l0 = math.inf
        else:
            alpha_l, alpha_l0 = critical_alphas(spec)

    zz = None
    if parametrized and flow_branch:
        zz = zigzag_angle(spec)

    kappa = None
    never_1d = False
    if parametrized:
        kappa = _degeneracy_order(spec.omega)
        never_1d = bool(kappa is not None and kappa > _KAPPA_DEGENERATE)

    return RegimeReport(
        s=spec.s,
        alpha=spec.alpha if parametrized else None,
        alpha_L=alpha_l,
        alpha_L0=alpha_l0,
        regime=regime,
        omega_tilde_min=vmin,
        argmin_phi=argmin_phi,
        zigzag_angle=zz,
        alpha_star=None,
        alpha_star_lower_bound=alpha_l,
        rho1d_never_minimizer=never_1d,
        degeneracy_order=kappa,
        argmin_set=_argmin_set(tilde),
    )
