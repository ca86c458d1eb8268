"""Local-stability analytics for segment-like configurations.

Four independent probes of whether vertically concentrated states can be
(locally) optimal:

* ``vertical_defect`` — leading coefficient of the generated-potential
  expansion off a vertical segment; negative means the potential dips off
  the segment, excluding vertical pieces from minimizer supports.
* ``defect_direct_check`` — numerical oracle for the same coefficient by
  evaluating the convolution difference at small offsets and fitting the
  fractional power.
* ``perturbation_coefficient`` — energy coefficient c_M of a sinusoidal
  horizontal perturbation of the 1D profile at frequency M; its sign for
  large M shows degenerate profiles are never locally optimal.
* ``comparison_potential`` — the mollifier construction that witnesses,
  for any 0<s<1, an admissible potential whose minimizer is exactly the
  vertical 1D profile.

``width_scaling_fit`` summarizes support-width sweeps against the predicted
power law alpha^(-1/(kappa+1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import BranchError, InvalidInputError, NumericalError
from ._quad import dyadic_panels, graded_rule_power, panel_rule
from .anglefn import AngleFunction, PotentialSpec, inverse_transform, log_inverse_transform
from .ellipse import _CoeffEngine
from .specfun import _tau_factor, eval_rho1, profile_constants, riesz_constants

__all__ = [
    "StabilityReport",
    "vertical_defect",
    "defect_direct_check",
    "perturbation_coefficient",
    "perturbation_sweep",
    "comparison_potential",
    "width_scaling_fit",
    "stability_report",
]


@dataclass(frozen=True)
class StabilityReport:
    vertical_defect_coeff: float
    vertical_excluded: bool
    c_M_table: tuple
    first_unstable_M: int | None
    width_fit: dict | None

    def to_json_dict(self) -> dict:
        return {
            "vertical_defect_coeff": self.vertical_defect_coeff,
            "vertical_excluded": self.vertical_excluded,
            "c_M_table": [[int(m), float(c)] for m, c in self.c_M_table],
            "first_unstable_M": self.first_unstable_M,
            "width_fit": self.width_fit,
        }


def _require_fractional(s: float, what: str):
    if not 0.0 < s < 1.0:
        raise BranchError(f"{what} is defined for 0 < s < 1 (got s={s})")


# -- vertical-segment defect -------------------------------------------------

def vertical_defect(spec: PotentialSpec, psi0: float) -> float:
    """Coefficient of eps^(1-s) in the potential expansion off a vertical
    segment carrying 1D density psi with psi(0) = psi0.

    Negative (equivalently, transformed profile positive along the first
    axis) means the generated potential strictly decreases when stepping off
    the segment, so vertical pieces cannot appear in locally minimal
    supports.
    """
    _require_fractional(spec.s, "vertical_defect")
    if not psi0 > 0.0:
        raise InvalidInputError("psi0 must be positive")
    tilde0 = float(spec.omega_tilde().values[0])
    return 0.5 / _tau_factor(2.0 - spec.s) * tilde0 * psi0


def _segment_potential_gap(spec: PotentialSpec, psi_scale: float, eps: float) -> float:
    """(W * rho)(eps, 0) - (W * rho)(0, 0) for rho = vertical segment with
    density psi(t) = psi_scale * rho1(t)."""
    s = spec.s
    prof = profile_constants(s)
    R = prof.R1
    omega = spec.total_angle()
    omega_v = float(omega.eval(math.pi / 2.0))

    delta = min(20.0 * eps, 0.5 * R)
    kmax = delta / eps

    # |t| <= delta, substituted t = eps*u.  The u^{-s} reference piece is
    # integrated with the power fused into the weights (stable for any
    # 0 < s < 1); the remaining factor is smooth.
    u_sm, w_sm = panel_rule(0.0, kmax, 24, 10)
    theta = np.arctan(u_sm)
    pair = omega.eval(theta) + omega.eval(-theta)
    smooth = (1.0 + u_sm * u_sm) ** (-0.5 * s) * pair
    psi_sm = psi_scale * eval_rho1(s, eps * u_sm)
    part_smooth = float(np.sum(w_sm * smooth * psi_sm))
    q = 3.0 / (1.0 - s) + 1.0
    u_sg, w_sg = graded_rule_power(kmax, q, 60, -s)
    psi_sg = psi_scale * eval_rho1(s, eps * u_sg)
    part_sing = 2.0 * omega_v * float(np.sum(w_sg * psi_sg))
    inner = eps ** (1.0 - s) * (part_smooth - part_sing)

    # delta <= |t| <= R: smooth, with scale-variation near t = delta and a
    # Holder endpoint at t = R.
    t_lo, w_lo = dyadic_panels(delta, 0.5 * R, delta, 20, 10)
    t_hi, w_hi = dyadic_panels(0.5 * R, R, R, 12, 8)
    t = np.concatenate([t_lo, t_hi])
    wt = np.concatenate([w_lo, w_hi])
    r = np.hypot(t, eps)
    ang = np.arctan2(-t, eps)
    pair = omega.eval(ang) + omega.eval(-ang)
    vals = r ** (-s) * pair - 2.0 * t ** (-s) * omega_v
    psi = psi_scale * eval_rho1(s, t)
    outer = float(np.sum(wt * vals * psi))

    mass = psi_scale  # rho1 has unit mass
    return inner + outer + eps * eps * mass


def defect_direct_check(spec: PotentialSpec, psi0: float,
                        eps_grid=None) -> float:
    """Fit the eps^(1-s) coefficient of the off-segment potential gap.

    Evaluates the convolution difference directly on a grid of offsets and
    least-squares fits c * eps^(1-s) + d * eps^2; returns the fitted c,
    which should reproduce :func:`vertical_defect` to a couple percent.
    """
    _require_fractional(spec.s, "defect_direct_check")
    if not psi0 > 0.0:
        raise InvalidInputError("psi0 must be positive")
    if eps_grid is None:
        eps_grid = np.geomspace(1e-4, 1e-2, 9)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if eps_grid.ndim != 1 or len(eps_grid) < 2:
        raise InvalidInputError("eps_grid needs at least two offsets")
    prof = profile_constants(spec.s)
    rho1_0 = prof.C1 * prof.R1 ** (1.0 + spec.s)
    psi_scale = psi0 / rho1_0
    gaps = np.array([_segment_potential_gap(spec, psi_scale, e) for e in eps_grid])
    basis = np.column_stack([eps_grid ** (1.0 - spec.s), eps_grid ** 2])
    coef, *_ = np.linalg.lstsq(basis, gaps, rcond=None)
    return float(coef[0])


# -- sinusoidal perturbation coefficient ------------------------------------

def _profile_rule(s: float, R: float, M: int):
    """Quadrature nodes/weights on [-R, R] resolving sin(M x) and the
    Holder endpoints of the 1D profile."""
    n_panels = max(10, int(math.ceil(M * R)))
    lo, wl = dyadic_panels(-R, -0.9 * R, -R, 12, 8)
    mid, wm = panel_rule(-0.9 * R, 0.9 * R, n_panels, 12)
    hi, wh = dyadic_panels(0.9 * R, R, R, 12, 8)
    return np.concatenate([lo, mid, hi]), np.concatenate([wl, wm, wh])


def _perturbation_integrals(s: float, M: int) -> tuple[float, float]:
    """The two double integrals (i1, i2) making up c_M.

    i1 carries the squared difference quotient against the |x-y|^(-s)
    kernel; i2 is the plain squared sine difference (always <= 4 since the
    profile has unit mass).
    """
    _require_fractional(s, "perturbation_coefficient")
    if M != int(M) or M < 1:
        raise InvalidInputError("M must be a positive integer")
    M = int(M)
    prof = profile_constants(s)
    R = prof.R1
    x, wx = _profile_rule(s, R, M)
    rho = eval_rho1(s, x)

    # i2 = 2 * int sin^2(Mx) rho - 2 * (int sin(Mx) rho)^2
    sx = np.sin(M * x)
    mean_sin = float(np.sum(wx * rho * sx))
    mean_sin2 = float(np.sum(wx * rho * sx * sx))
    i2 = 2.0 * mean_sin2 - 2.0 * mean_sin ** 2

    # i1 = 2 int_x rho(x) int_0^{x+R} 4 cos^2(M(x-t/2)) (sin(Mt/2)/t)^2
    #        rho(x-t) t^{-s} dt dx,
    # with t = (x+R) v^{1/(1-s)} flattening the t^{-s} factor exactly.
    n_vp = max(12, int(math.ceil(M / 2)))
    v, wv = panel_rule(0.0, 1.0, n_vp, 10)
    T = (x + R)[:, None]
    t = T * v[None, :] ** (1.0 / (1.0 - s))
    y = x[:, None] - t
    quot = np.sin(0.5 * M * t) / t
    inner = 4.0 * np.cos(M * (x[:, None] - 0.5 * t)) ** 2 * quot * quot * eval_rho1(s, y)
    inner_sum = inner @ wv
    i1 = 2.0 * float(np.sum(wx * rho * (x + R) ** (1.0 - s) / (1.0 - s) * inner_sum))
    return i1, i2


def perturbation_coefficient(s: float, M: int) -> float:
    """Energy coefficient c_M of the frequency-M sinusoidal horizontal
    perturbation of the vertical 1D profile (isotropic part only).

    c_M = -(s/4) * i1 + (1/2) * i2; i2 <= 4 always (enforced), while i1
    grows like a power of M, so c_M < 0 for all large M.
    """
    i1, i2 = _perturbation_integrals(s, M)
    if i2 > 4.0 + 1e-9:
        raise NumericalError(
            f"second perturbation integral {i2!r} exceeds its bound of 4"
        )
    return -(s / 4.0) * i1 + 0.5 * i2


def perturbation_sweep(s: float, m_max: int = 64) -> list:
    """[(M, c_M)] for M = 1..m_max."""
    return [(m, perturbation_coefficient(s, m)) for m in range(1, m_max + 1)]


# -- comparison potential (mollifier construction) ---------------------------

def _bump_values(n: int, width: float) -> np.ndarray:
    theta = np.arange(n) * math.pi / n
    u = (theta - math.pi / 2.0) / width
    out = np.zeros(n)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def comparison_potential(s: float, concentration: float) -> tuple[AngleFunction, float]:
    """Construct the concentrated comparison profile and its horizontal
    quadratic coefficient A.

    The transformed profile is a smooth bump at pi/2 of half-width
    1/concentration, normalized so the profile itself equals 1 at pi/2;
    A < 1 certifies that the vertical 1D profile minimizes the associated
    energy.  ``s = 0`` selects the logarithmic branch.
    """
    if concentration <= 2.0 / math.pi * 1.02:
        raise InvalidInputError(
            "concentration too low: the bump support must avoid the axis "
            "direction (need concentration > 0.65)"
        )
    width = 1.0 / concentration
    # narrow bumps need a proportionally finer grid for spectral accuracy
    n = 1 << max(10, int(math.ceil(math.log2(640.0 * concentration))))
    n = min(n, 1 << 14)
    bump = _bump_values(n, width)

    if s == 0.0:
        # the logarithmic transform of any profile has grid mass 1/2 on
        # [0, pi); match it, then shift the inverted profile to 1 at pi/2
        # (an additive shift does not change the transform)
        mass = float(np.sum(bump)) * math.pi / n
        tilde = AngleFunction(bump / (2.0 * mass), symmetric=True)
        raw = log_inverse_transform(tilde)
        shift = 1.0 - float(raw.values[n // 2])
        omega_star = AngleFunction(raw.values + shift, symmetric=True)
        # evaluate the quadratic coefficient on the exact transformed
        # profile (re-deriving it from omega_star would pollute the exact
        # zero along the collapsed axis with roundtrip error)
        engine = _CoeffEngine(PotentialSpec.direct(0.0, omega_star), tilde, 0.0)
        a_coeff = engine.coeffs(0.0, 1.0)[0]
    elif 0.0 < s < 1.0:
        lo = math.pi / 2.0 - width
        hi = math.pi / 2.0 + width
        phi, wq = panel_rule(lo, hi, 24, 12)
        u = (phi - math.pi / 2.0) / width
        kern = np.zeros_like(phi)
        inside = np.abs(u) < 1.0
        kern[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        kern *= np.sin(phi) ** (-s)
        i_norm = float(np.sum(wq * kern))
        i_cot = float(np.sum(wq * kern / np.tan(phi) ** 2))
        tau_s = riesz_constants(s).tau_s
        tilde = AngleFunction(bump / (2.0 * tau_s * i_norm), symmetric=True)
        omega_star = inverse_transform(tilde, s)
        # the vertical coefficient stays 1 under this normalization, and the
        # horizontal one is the kernel-weighted mean of cot^2 (verified
        # against the ellipse engine's degenerate branch and a direct
        # convolution of the segment profile)
        a_coeff = i_cot / i_norm
    else:
        raise BranchError(
            f"comparison_potential needs 0 < s < 1 or the logarithmic "
            f"branch (got s={s})"
        )

    vals = omega_star.values
    i_min = int(np.argmin(vals))
    if abs(vals[n // 2] - 1.0) > 1e-6 or vals[i_min] < 1.0 - 1e-6:
        raise NumericalError(
            "comparison profile failed its normalization checks "
            f"(value at pi/2 = {vals[n // 2]!r}, min = {vals[i_min]!r})"
        )
    if not a_coeff < 1.0:
        raise InvalidInputError(
            f"A = {a_coeff:.6g} >= 1 at concentration {concentration:g}; "
            "increase the concentration"
        )
    return omega_star, float(a_coeff)


# -- width scaling ------------------------------------------------------------

def width_scaling_fit(data, kappa: float) -> dict:
    """Least-squares exponent of width vs alpha on log-log axes, compared
    with the predicted -1/(kappa+1).

    ``data`` is a sequence of (alpha, width) pairs: at least three, with
    positive entries and alphas spanning at least a decade.
    """
    pts = [(float(a), float(w)) for a, w in data]
    if len(pts) < 3:
        raise InvalidInputError("width_scaling_fit needs at least 3 points")
    alphas = np.array([p[0] for p in pts])
    widths = np.array([p[1] for p in pts])
    if np.any(alphas <= 0.0) or np.any(widths <= 0.0):
        raise InvalidInputError("alphas and widths must be positive")
    if np.max(alphas) / np.min(alphas) < 10.0 * (1.0 - 1e-12):
        raise InvalidInputError("alpha values must span at least one decade")
    slope = float(np.polyfit(np.log(alphas), np.log(widths), 1)[0])
    return {
        "kappa": float(kappa),
        "fitted_exponent": slope,
        "target_exponent": -1.0 / (float(kappa) + 1.0),
    }


# -- assembled report ---------------------------------------------------------

def stability_report(spec: PotentialSpec, m_max: int = 32,
                     psi0: float | None = None,
                     width_fit: dict | None = None) -> StabilityReport:
    """Bundle the defect coefficient and the c_M sweep for one spec."""
    _require_fractional(spec.s, "stability_report")
    if psi0 is None:
        prof = profile_constants(spec.s)
        psi0 = prof.C1 * prof.R1 ** (1.0 + spec.s)  # the 1D profile's peak
    coeff = vertical_defect(spec, psi0)
    table = perturbation_sweep(spec.s, m_max)
    first = next((m for m, c in table if c < 0.0), None)
    return StabilityReport(
        vertical_defect_coeff=coeff,
        vertical_excluded=coeff < 0.0,
        c_M_table=tuple(table),
        first_unstable_M=first,
        width_fit=width_fit,
    )
