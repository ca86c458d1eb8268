"""Special-function backend and closed-form minimizer profiles.

Everything here is scalar closed-form math: a Gamma/Beta implementation
(Lanczos approximation, no external dependencies), the angular kernel
constants that drive the angle transforms, and the radial profiles of the
isotropic 1D and 2D ground states together with their normalization
constants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import BranchError, DomainError

__all__ = [
    "gamma",
    "log_abs_gamma",
    "beta",
    "gamma_angle",
    "RieszConstants",
    "riesz_constants",
    "ProfileConstants",
    "profile_constants",
    "eval_rho1",
    "eval_rho2",
    "support_radius_bound",
]

# Lanczos approximation, g = 7 with 9 coefficients: relative error below
# 2e-15 on the positive half line after reflection.
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function for real ``x`` away from the poles at 0, -1, -2, ...

    Raises:
        DomainError: if ``x`` is a pole (nonpositive integer).
    """
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma pole at x={x}")
    if x < 0.5:
        # Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc


def log_abs_gamma(x: float) -> float:
    """log|Gamma(x)| for real non-pole ``x`` (overflow-safe for large x)."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise DomainError(f"gamma pole at x={x}")
    if x < 0.5:
        return (
            math.log(math.pi)
            - math.log(abs(math.sin(math.pi * x)))
            - log_abs_gamma(1.0 - x)
        )
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(acc)


def beta(p: float, q: float) -> float:
    """Euler Beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p+q)."""
    return gamma(p) * gamma(q) / gamma(p + q)


def gamma_angle(s: float) -> float:
    """Circle integral of ``|cos(theta)|**s`` over a full period.

    Closed form ``2 sqrt(pi) Gamma((s+1)/2) / Gamma((s+2)/2)``, which also
    analytically continues the integral to ``-2 < s < -1`` (where the value
    is negative).  Defined for ``s > -2`` except the pole at ``s = -1``.
    """
    s = float(s)
    if s <= -2.0:
        raise DomainError(f"gamma_angle undefined for s={s} <= -2")
    if s == -1.0:
        raise DomainError("gamma_angle has a pole at s=-1")
    return 2.0 * math.sqrt(math.pi) * gamma((s + 1.0) / 2.0) / gamma((s + 2.0) / 2.0)


def _c_factor(s: float) -> float:
    """Angle transform of the constant function 1 (exponent ``s`` in (0,2))."""
    return math.pi ** (s - 1.0) * gamma((2.0 - s) / 2.0) / gamma(s / 2.0)


def _tau_factor(s: float) -> float:
    """Normalization constant of the inverse angle transform on (0,2).

    Vanishes at ``s = 1`` (where the transform degenerates to a half-period
    shift); positive below 1, negative above.
    """
    if s == 1.0:
        return 0.0
    return (2.0 * math.pi) ** (-s) * gamma(s) * math.cos(s * math.pi / 2.0)


def _tau_extended(s: float) -> float:
    """Continuation of ``tau_s * R1**(2+s)`` across the whole range (0,2).

    For 0 < s < 1 it factors as the inverse-transform constant times the
    1D-profile radius raised to ``2+s``; written via Beta functions the
    product stays finite and positive up to s = 2, which is what the
    quadratic-coefficient integrals need for exponents >= 1.
    """
    return (
        (2.0 * math.pi) ** (-s)
        * gamma(s)
        * s
        * (s + 1.0)
        * math.pi
        / (2.0 * beta(0.5, (3.0 + s) / 2.0))
    )


@dataclass(frozen=True)
class RieszConstants:
    """Kernel constants of the angle transforms at exponent ``s``.

    Fields:
        s: repulsion exponent in (0, 2).
        gamma_s: circle integral of |cos|**s.
        c_s: transform of the constant function 1.
        tau_s: inverse-transform normalization (0 at s=1).
        tau_extended: continuation of tau_s * R1**(2+s) to all of (0, 2).
    """

    s: float
    gamma_s: float
    c_s: float
    tau_s: float
    tau_extended: float


def riesz_constants(s: float) -> RieszConstants:
    """Evaluate the kernel constants at exponent ``s`` in (0, 2)."""
    s = float(s)
    if not 0.0 < s < 2.0:
        raise DomainError(f"riesz_constants requires 0 < s < 2, got {s}")
    return RieszConstants(
        s=s,
        gamma_s=gamma_angle(s),
        c_s=_c_factor(s),
        tau_s=_tau_factor(s),
        tau_extended=_tau_extended(s),
    )


@dataclass(frozen=True)
class ProfileConstants:
    """Normalization constants of the isotropic ground-state profiles.

    The 2D profile is ``rho2(x) = C2 (R2^2 - |x|^2)_+^{s/2}`` and the 1D
    profile is ``rho1(x) = C1 (R1^2 - x^2)_+^{(1+s)/2}``; both have unit
    mass.  ``V1`` is the potential level the 1D profile generates on its own
    support.  The 1D constants exist only for ``s < 1`` (and in the
    logarithmic case ``s = 0``, where the radial powers become 0 and 1/2 and
    the 2D profile is the uniform disk).
    """

    s: float
    logarithmic: bool
    R1: float | None
    C1: float | None
    R2: float
    C2: float
    V1: float | None


def profile_constants(s: float) -> ProfileConstants:
    """Profile constants for exponent ``s`` in [0, 2); ``s = 0`` means the
    logarithmic branch (a distinct branch, not a limit evaluation)."""
    s = float(s)
    if not 0.0 <= s < 2.0:
        raise DomainError(f"profile_constants requires 0 <= s < 2, got {s}")
    if s == 0.0:
        return ProfileConstants(
            s=0.0,
            logarithmic=True,
            R1=1.0,
            C1=2.0 / math.pi,
            R2=1.0 / math.sqrt(2.0),
            C2=2.0 / math.pi,
            V1=0.75 + math.log(2.0),
        )
    C2 = 4.0 * math.sin(s * math.pi / 2.0) / (s * s * math.pi * math.pi)
    R2 = (8.0 * math.sin(s * math.pi / 2.0) / (s * s * (2.0 + s) * math.pi)) ** (
        1.0 / (-s - 2.0)
    )
    if s < 1.0:
        C1 = 2.0 * math.cos(s * math.pi / 2.0) / (s * (s + 1.0) * math.pi)
        R1 = (C1 * beta(0.5, (3.0 + s) / 2.0)) ** (1.0 / (-s - 2.0))
        V1 = R1 * R1 * (1.0 / s + 1.0 / (4.0 + s))
    else:
        C1 = R1 = V1 = None
    return ProfileConstants(s=s, logarithmic=False, R1=R1, C1=C1, R2=R2, C2=C2, V1=V1)


def eval_rho1(s: float, x):
    """1D ground-state profile ``C1 (R1^2 - x^2)_+^{(1+s)/2}`` at ``x``.

    Accepts scalars or arrays.  Only defined on the branch ``0 <= s < 1``
    (``s = 0`` logarithmic).
    """
    prof = profile_constants(s)
    if prof.R1 is None:
        raise BranchError(f"the 1D profile is not defined for s={s} >= 1")
    x = np.asarray(x, dtype=float)
    core = np.maximum(prof.R1 * prof.R1 - x * x, 0.0)
    expo = (1.0 + s) / 2.0
    out = prof.C1 * core**expo
    return float(out) if out.ndim == 0 else out


def eval_rho2(s: float, x):
    """2D ground-state profile ``C2 (R2^2 - |x|^2)_+^{s/2}`` at point ``x``.

    ``x`` is a length-2 point or an (..., 2) array.  In the logarithmic case
    the exponent is 0, i.e. the profile is the uniform disk density.
    """
    prof = profile_constants(s)
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != 2:
        raise DomainError("eval_rho2 expects a planar point or (..., 2) array")
    r2 = x[..., 0] ** 2 + x[..., 1] ** 2
    core = prof.R2 * prof.R2 - r2
    if prof.logarithmic:
        out = np.where(core >= 0.0, prof.C2, 0.0)
    else:
        out = prof.C2 * np.maximum(core, 0.0) ** (s / 2.0)
    return float(out) if out.ndim == 0 else out


def support_radius_bound(s: float) -> float:
    """Universal radius bound ``3 sqrt(V1/2)`` for supports of global
    minimizers (independent of the anisotropy)."""
    prof = profile_constants(s)
    if prof.V1 is None:
        raise BranchError(f"support bound requires the 1D branch, got s={s}")
    return 3.0 * math.sqrt(prof.V1 / 2.0)
