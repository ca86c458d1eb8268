"""Quadratic confinement coefficients and the ellipse minimizer solver.

For an interaction potential ``|x|^{-s} Omega(theta) + |x|^2`` (or its
logarithmic counterpart), the candidate minimizers are normalized uniform
measures on ellipses with semi-axis scale factors ``(a, b)`` rotated by
``eta``.  The generated potential inside such an ellipse is the quadratic
form ``A x1^2 + B x2^2 + 2 D x1 x2`` (up to an additive constant), where
``A, B, D`` are one-dimensional angular integrals of the transformed
profile against the ellipse kernel

    (a^2 cos^2(phi) + b^2 sin^2(phi))^{-(2+s)/2}        (power branch)
    (a^2 cos^2(phi) + b^2 sin^2(phi))^{-1}              (logarithmic branch).

A minimizer balances the confinement exactly: ``A = B = 1`` and ``D = 0``.
:func:`solve_ellipse` finds that balance point, including rotated solutions
for asymmetric profiles and the degenerate ``a = 0`` (segment) limit at the
boundary of the admissible region.

Quadrature strategy: as long as the aspect ratio is moderate, every angular
integral is a periodic trapezoid sum on the profile grid (spectrally
accurate).  Once ``min(a,b) < 5e-2 * max(a,b)`` the kernel develops a peak
narrower than the grid resolves, and the integrals switch to a folded rule
on ``(0, pi/2]`` with dyadic panels toward the peak.  At ``a = 0`` exactly,
the kernel is genuinely singular; the integrals are evaluated
cancellation-free in Fourier space with the leading Taylor terms of the
profile split off and integrated in closed form (Beta-function moments of
``sin^{-s}``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._errors import (
    BranchError,
    DivergenceError,
    InvalidInputError,
    NumericalError,
    RegimeError,
)
from ._minimize import golden_min
from ._quad import dyadic_panels, graded_rule, panel_rule
from .anglefn import AngleFunction, PotentialSpec
from .specfun import beta, profile_constants, riesz_constants

__all__ = [
    "QuadCoeffs",
    "EllipseParams",
    "EllipseSolution",
    "quad_coeffs",
    "quad_coeffs_high_s",
    "solve_ellipse",
    "potential_constant",
    "project_ellipse",
    "boundary_polyline",
    "physical_semiaxes",
    "interaction_integral",
    "scaled_energy",
]

# relative tolerance on min(omega_tilde) for the admissibility check
_LIC_TOL = 1e-10
# relative tolerance for "the transformed profile vanishes here"
_VANISH_TOL = 1e-8
# below this aspect ratio the periodic trapezoid no longer resolves the
# kernel peak (error ~ exp(-n * a/b) with n = 1024) and the folded rule
# takes over
_PEAK_RATIO = 5e-2
# aspect-equation root beyond this ratio is declared degenerate
_DEGENERATE_RATIO = 1e6
_BRACKET_START = (1e-3, 1e3)
_BRACKET_LIMIT = 1e9
_ETA_SCAN = 64
_POLISH_TOL = 1e-12
_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class QuadCoeffs:
    """Coefficients of the matched quadratic confinement."""

    A: float
    B: float
    D: float


@dataclass(frozen=True)
class EllipseParams:
    """Semi-axis scale factors, rotation angle, and degeneracy flag.

    ``a = 0`` encodes the degenerate segment limit (the ellipse collapses
    onto the rotated second axis).  For proper ellipses ``eta`` is reduced
    to ``[0, pi/2)`` (the quarter-turn ambiguity is resolved by swapping
    the axes); degenerate parameters use ``eta`` in ``[0, pi)``.
    """

    a: float
    b: float
    eta: float
    degenerate: bool = False

    def __post_init__(self):
        if self.a < 0.0 or self.b < 0.0:
            raise InvalidInputError("semi-axis factors must be nonnegative")
        if self.a == 0.0 and self.b == 0.0:
            raise InvalidInputError("semi-axis factors cannot both vanish")
        if self.degenerate != (self.a == 0.0 or self.b == 0.0):
            raise InvalidInputError(
                "degenerate flag must match a vanishing semi-axis"
            )
        if not 0.0 <= self.eta < math.pi:
            raise InvalidInputError("eta must lie in [0, pi)")
        if not self.degenerate and self.eta >= math.pi / 2.0:
            raise InvalidInputError(
                "proper-ellipse eta must lie in [0, pi/2)"
            )

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "eta": self.eta,
            "degenerate": self.degenerate,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EllipseParams":
        return cls(
            a=float(data["a"]),
            b=float(data["b"]),
            eta=float(data["eta"]),
            degenerate=bool(data["degenerate"]),
        )


@dataclass(frozen=True)
class EllipseSolution:
    """Solver output: the minimizer, its coefficients, and all roots found."""

    params: EllipseParams
    coeffs: QuadCoeffs
    energy: float
    stationary_points: tuple


def _prefactor(spec: PotentialSpec) -> float:
    if spec.logarithmic:
        return 1.0
    rc = riesz_constants(spec.s)
    pc = profile_constants(spec.s)
    return rc.tau_extended / pc.R2 ** (2.0 + spec.s)


def _sin_moment(mu: float) -> float:
    """``integral_0^{pi/2} sin(t)**mu dt`` for ``mu > -1``."""
    return 0.5 * beta(0.5 * (1.0 + mu), 0.5)


def _sin_cos2_moment(mu: float) -> float:
    """``integral_0^{pi/2} sin(t)**mu cos(t)**2 dt`` for ``mu > -1``."""
    return 0.5 * beta(0.5 * (1.0 + mu), 1.5)


def _tame_nodes() -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on ``(0, pi/2]`` for integrands ~ t^{2-s} at 0."""
    t1, w1 = graded_rule(0.5, 3.0, 40)
    t2, w2 = panel_rule(0.5, math.pi / 2.0, 16, 12)
    return np.concatenate([t1, t2]), np.concatenate([w1, w2])


class _CoeffEngine:
    """All angular integrals for one ``(spec, eta)`` pair.

    The rotation is folded into the profile once (an exact spectral
    shift); every subsequent coefficient evaluation is then a fast
    function of ``(a, b)`` alone.
    """

    def __init__(self, spec: PotentialSpec, tilde: AngleFunction, eta: float):
        self.spec = spec
        self.tilde = tilde
        self.eta = float(eta)
        self.s = spec.s
        self.log = spec.logarithmic
        self.pref = _prefactor(spec)
        self.n = tilde.n
        th = tilde.theta
        self._cos2 = np.cos(th) ** 2
        self._sin2 = np.sin(th) ** 2
        self._cossin = np.cos(th) * np.sin(th)
        self._F = tilde.shifted_values(self.eta)
        self._h = 2.0 * math.pi / self.n  # full-circle trapezoid weight
        self._scale = max(float(np.max(np.abs(tilde.values))), 1e-300)

    # -- dispatch ----------------------------------------------------------

    def coeffs(self, a: float, b: float) -> tuple[float, float, float]:
        a, b = float(a), float(b)
        if a < 0.0 or b < 0.0 or (a == 0.0 and b == 0.0):
            raise InvalidInputError("semi-axis factors must be >= 0, not both 0")
        if min(a, b) == 0.0:
            return self._coeffs_degenerate(a, b)
        if min(a, b) < _PEAK_RATIO * max(a, b):
            return self._coeffs_peaked(a, b)
        return self._coeffs_grid(a, b)

    def mass(self, a: float, b: float) -> float:
        """Interaction integral of the normalized ellipse state."""
        if self.log:
            return self._log_mass(a, b)
        A, B, _ = self.coeffs(a, b)
        # exact identity: the kernel power drops by one when multiplied by
        # the quadratic form itself
        return a * a * A + b * b * B

    def energy(self, a: float, b: float) -> float:
        half = 0.5 if self.log else 0.5 * self.s
        return self.mass(a, b) + half * (a * a + b * b)

    # -- moderate aspect: periodic trapezoid --------------------------------

    def _coeffs_grid(self, a: float, b: float):
        q = a * a * self._cos2 + b * b * self._sin2
        if self.log:
            w = self._F / q
        else:
            w = self._F * q ** (-(2.0 + self.s) / 2.0)
        h = self.pref * self._h
        return (
            h * float(np.sum(w * self._cos2)),
            h * float(np.sum(w * self._sin2)),
            h * float(np.sum(w * self._cossin)),
        )

    def _log_mass_grid(self, a: float, b: float) -> float:
        q = a * a * self._cos2 + b * b * self._sin2
        return -0.5 * self._h * float(np.sum(np.log(q) * self._F))

    # -- extreme aspect: folded rule with dyadic panels ----------------------

    def _peak_nodes(self, ratio: float):
        levels = min(60, max(12, int(math.ceil(math.log2(1.0 / ratio))) + 8))
        return dyadic_panels(0.0, math.pi / 2.0, 0.0, levels, 12)

    def _fold_parts(self, ts: np.ndarray, shift: float):
        plus = self.tilde.eval(shift + ts)
        minus = self.tilde.eval(shift - ts)
        return plus + minus, plus - minus

    def _coeffs_peaked(self, a: float, b: float):
        if a <= b:
            return self._coeffs_folded(a, b, self.eta)
        A_sw, B_sw, D_sw = self._coeffs_folded(b, a, self.eta + math.pi / 2.0)
        return B_sw, A_sw, -D_sw

    def _coeffs_folded(self, small: float, big: float, shift: float):
        """(A, B, D) with the kernel peak at t = 0 (small first axis)."""
        ts, ws = self._peak_nodes(small / big)
        ct, st = np.cos(ts), np.sin(ts)
        q = small * small * ct**2 + big * big * st**2
        kern = 1.0 / q if self.log else q ** (-(2.0 + self.s) / 2.0)
        S, Delta = self._fold_parts(ts, shift)
        h = 2.0 * self.pref
        A = h * float(np.sum(ws * kern * ct * ct * S))
        B = h * float(np.sum(ws * kern * st * st * S))
        D = h * float(np.sum(ws * kern * ct * st * Delta))
        return A, B, D

    def _log_mass_peaked(self, a: float, b: float) -> float:
        if a <= b:
            small, big, shift = a, b, self.eta
        else:
            small, big, shift = b, a, self.eta + math.pi / 2.0
        ts, ws = self._peak_nodes(small / big)
        q = small * small * np.cos(ts) ** 2 + big * big * np.sin(ts) ** 2
        S, _ = self._fold_parts(ts, shift)
        return -float(np.sum(ws * np.log(q) * S))

    # -- degenerate axis: spectral split with closed-form moments ------------

    def _mode_data(self, shift: float):
        """Cosine/sine pair amplitudes of the profile recentred at ``shift``.

        With ``F(x) = tilde(shift + x)``:
          ``F(t) + F(-t) = 2*(a0 + sum ac_k cos(2 k t))``
          ``F(t) - F(-t) = 2 * sum as_k sin(2 k t)``.
        """
        const, ks, cos_c, sin_c = self.tilde.real_modes()
        ang = 2.0 * ks.astype(float) * shift
        ac = cos_c * np.cos(ang) + sin_c * np.sin(ang)
        asn = sin_c * np.cos(ang) - cos_c * np.sin(ang)
        return const, ks.astype(float), ac, asn

    def _coeffs_degenerate(self, a: float, b: float):
        if not self.log and self.s >= 1.0:
            raise DivergenceError(
                "degenerate-axis coefficients are nonintegrable for s >= 1",
                coefficient="A",
            )
        if a == 0.0:
            A, B, D = self._degenerate_folded(b, self.eta)
            return A, B, D
        A_sw, B_sw, D_sw = self._degenerate_folded(a, self.eta + math.pi / 2.0)
        return B_sw, A_sw, -D_sw

    def _degenerate_folded(self, big: float, shift: float):
        s = self.s  # 0.0 on the logarithmic branch: the formulas unify
        const, kf, ac, asn = self._mode_data(shift)
        F0 = const + float(np.sum(ac))
        F1 = 2.0 * float(np.sum(kf * asn))
        F2 = -4.0 * float(np.sum(kf * kf * ac))
        if abs(F0) > _VANISH_TOL * self._scale:
            raise DivergenceError(
                "transformed profile does not vanish along the collapsed "
                f"axis (value {F0:.3e}); the confinement coefficient diverges",
                coefficient="A",
            )
        ts, ws = _tame_nodes()
        st, ct = np.sin(ts), np.cos(ts)
        kt = np.multiply.outer(ts, kf)  # nodes x modes
        # cancellation-free residuals after stripping Taylor terms at t=0
        sin_kt2 = np.sin(kt) ** 2
        s_sub = -4.0 * (sin_kt2 @ ac)                       # S - 2 F0
        s_sub2 = -4.0 * ((sin_kt2 - np.outer(st**2, kf**2)) @ ac)
        d_sub = 2.0 * ((np.sin(2.0 * kt) - np.outer(np.sin(2.0 * ts), kf)) @ asn)
        j1 = _sin_moment(-s)
        jcc = _sin_cos2_moment(-s)
        A_fold = 2.0 * (float(np.sum(ws * ct**2 * st ** (-2.0 - s) * s_sub2))
                        + F2 * jcc)
        B_fold = 2.0 * (float(np.sum(ws * st ** (-s) * s_sub)) + 2.0 * F0 * j1)
        D_fold = 2.0 * (float(np.sum(ws * ct * st ** (-1.0 - s) * d_sub))
                        + 2.0 * F1 * jcc)
        power = big ** (-(2.0 + s)) if not self.log else big ** (-2.0)
        scale = self.pref * power
        return scale * A_fold, scale * B_fold, scale * D_fold

    def _log_mass_degenerate(self, a: float, b: float) -> float:
        if a == 0.0:
            big, shift = b, self.eta
        else:
            big, shift = a, self.eta + math.pi / 2.0
        const, kf, ac, asn = self._mode_data(shift)
        F0 = const + float(np.sum(ac))
        ts, ws = _tame_nodes()
        kt = np.multiply.outer(ts, kf)
        s_sub = -4.0 * (np.sin(kt) ** 2 @ ac)  # S - 2 F0
        int_s = float(np.sum(ws * s_sub)) + 2.0 * F0 * (math.pi / 2.0)
        int_log = (float(np.sum(ws * np.log(np.sin(ts)) * s_sub))
                   - 2.0 * F0 * (math.pi / 2.0) * math.log(2.0))
        return -2.0 * math.log(big) * int_s - 2.0 * int_log

    def _log_mass(self, a: float, b: float) -> float:
        if min(a, b) == 0.0:
            return self._log_mass_degenerate(a, b)
        if min(a, b) < _PEAK_RATIO * max(a, b):
            return self._log_mass_peaked(a, b)
        return self._log_mass_grid(a, b)


# -- public coefficient / energy entry points --------------------------------


def quad_coeffs(spec: PotentialSpec, a: float, b: float, eta: float = 0.0) -> QuadCoeffs:
    """Quadratic confinement coefficients of the ``(a, b, eta)`` ellipse.

    Rotation is handled by shifting the transformed profile; a degenerate
    axis (``a = 0`` or ``b = 0``) is admitted only when the profile
    vanishes along the collapsed direction, otherwise the corresponding
    integral diverges and a :class:`DivergenceError` is raised.
    """
    eng = _CoeffEngine(spec, spec.omega_tilde(), eta)
    A, B, D = eng.coeffs(a, b)
    return QuadCoeffs(A=A, B=B, D=D)


def quad_coeffs_high_s(spec: PotentialSpec, a: float, b: float) -> QuadCoeffs:
    """Direct coefficient formula for ``1 <= s < 2`` (symmetric profiles).

    Independent of :func:`quad_coeffs` (which continues the ``s < 1``
    formula): this one integrates the raw profile against the projected
    ellipse kernel using the circle-to-ellipse angle map, with the limit
    constant ``2 sin(s pi/2)/(s pi)`` (equal to ``2/pi`` at ``s = 1``).
    """
    s = spec.s
    if not 1.0 <= s < 2.0:
        raise BranchError(f"direct formula requires 1 <= s < 2, got {s}")
    omega = spec.total_angle()
    if not omega.symmetric:
        raise BranchError(
            "the direct high-exponent formula requires an even profile"
        )
    if a <= 0.0 or b <= 0.0:
        raise InvalidInputError("the direct formula needs a, b > 0")
    pc = profile_constants(s)
    den = 2.0 * math.sin(s * math.pi / 2.0) / (s * math.pi)
    n = omega.n
    # psi grid over one period of the (pi-periodic) integrand
    psi = -math.pi / 2.0 + np.arange(n) * (math.pi / n)
    cpsi, spsi = np.cos(psi), np.sin(psi)
    phi = np.arctan2(b * spsi, a * cpsi)  # ellipse angle map, pole-free
    core = (a * a * cpsi**2 + b * b * spsi**2) ** (-s / 2.0) * omega.eval(phi)
    h = math.pi / n
    front = pc.C2 / den * h
    A = a ** (-2.0) * front * float(np.sum(((s - 1.0) * cpsi**2 + spsi**2) * core))
    B = b ** (-2.0) * front * float(np.sum((cpsi**2 + (s - 1.0) * spsi**2) * core))
    return QuadCoeffs(A=A, B=B, D=0.0)


def interaction_integral(spec: PotentialSpec, a: float, b: float, eta: float = 0.0) -> float:
    """Interaction part of the rescaled ellipse energy (the 'mass' term)."""
    eng = _CoeffEngine(spec, spec.omega_tilde(), eta)
    return eng.mass(a, b)


def scaled_energy(spec: PotentialSpec, a: float, b: float, eta: float = 0.0) -> float:
    """Rescaled total energy: interaction plus ``(s/2)(a^2+b^2)``
    (``(a^2+b^2)/2`` on the logarithmic branch)."""
    eng = _CoeffEngine(spec, spec.omega_tilde(), eta)
    return eng.energy(a, b)


# -- the solver ---------------------------------------------------------------


@dataclass
class _Candidate:
    eta: float
    a: float
    b: float
    engine: _CoeffEngine
    degenerate: bool = False

    def coeffs(self):
        return self.engine.coeffs(self.a, self.b)

    def energy(self) -> float:
        return self.engine.energy(self.a, self.b)


def _aspect_mismatch(eng: _CoeffEngine, bv: float) -> float:
    A, B, _ = eng.coeffs(1.0, bv)
    if A <= 0.0 or B <= 0.0:
        raise NumericalError(
            f"nonpositive coefficient during aspect solve: A={A}, B={B} "
            f"at b={bv}, eta={eng.eta}"
        )
    return math.log(A / B)


def _solve_aspect(eng: _CoeffEngine):
    """Root of ``A(1,b) = B(1,b)``; ``None`` when the root degenerates."""
    lo, hi = _BRACKET_START
    flo, fhi = _aspect_mismatch(eng, lo), _aspect_mismatch(eng, hi)
    while flo * fhi > 0.0:
        grown = False
        if hi < _BRACKET_LIMIT:
            hi *= 10.0
            fhi = _aspect_mismatch(eng, hi)
            grown = True
        if flo * fhi <= 0.0:
            break
        if lo > 1.0 / _BRACKET_LIMIT:
            lo /= 10.0
            flo = _aspect_mismatch(eng, lo)
            grown = True
        if not grown:
            return None  # no sign change across 18 decades: degenerate
    llo, lhi = math.log(lo), math.log(hi)
    for _ in range(90):
        mid = 0.5 * (llo + lhi)
        fm = _aspect_mismatch(eng, math.exp(mid))
        if fm == 0.0:
            llo = lhi = mid
            break
        if (fm > 0.0) == (flo > 0.0):
            llo, flo = mid, fm
        else:
            lhi = mid
        if lhi - llo < 1e-15:
            break
    bstar = math.exp(0.5 * (llo + lhi))
    if bstar > _DEGENERATE_RATIO or bstar < 1.0 / _DEGENERATE_RATIO:
        return None
    A, _, _ = eng.coeffs(1.0, bstar)
    lam = math.sqrt(A) if eng.log else A ** (1.0 / (2.0 + eng.s))
    return lam, lam * bstar


def _newton_polish(eng: _CoeffEngine, a: float, b: float):
    """Drive ``(A-1, B-1)`` to zero with a finite-difference Jacobian."""
    res = None
    for _ in range(14):
        A, B, _ = eng.coeffs(a, b)
        r0, r1 = A - 1.0, B - 1.0
        res = max(abs(r0), abs(r1))
        if res < _POLISH_TOL:
            break
        ha, hb = 1e-7 * a, 1e-7 * b
        Apa, Bpa, _ = eng.coeffs(a + ha, b)
        Ama, Bma, _ = eng.coeffs(a - ha, b)
        Apb, Bpb, _ = eng.coeffs(a, b + hb)
        Amb, Bmb, _ = eng.coeffs(a, b - hb)
        j00 = (Apa - Ama) / (2.0 * ha)
        j01 = (Apb - Amb) / (2.0 * hb)
        j10 = (Bpa - Bma) / (2.0 * ha)
        j11 = (Bpb - Bmb) / (2.0 * hb)
        det = j00 * j11 - j01 * j10
        if det == 0.0:
            break
        da = (r0 * j11 - r1 * j01) / det
        db = (r1 * j00 - r0 * j10) / det
        step = 1.0
        while (a - step * da <= 0.0 or b - step * db <= 0.0) and step > 1e-8:
            step *= 0.5
        a -= step * da
        b -= step * db
    return a, b, res


def _proper_candidate(spec, tilde, eta):
    """Solve the aspect equation at fixed ``eta``; ``None`` if degenerate."""
    eng = _CoeffEngine(spec, tilde, eta)
    seed = _solve_aspect(eng)
    if seed is None:
        return None
    a, b, res = _newton_polish(eng, *seed)
    if res is None or res > _RESIDUAL_TOL:
        raise NumericalError(
            f"aspect polish stalled at residual {res} (eta={eta})"
        )
    return _Candidate(eta=eta, a=a, b=b, engine=eng)


def _degenerate_candidates(spec, tilde):
    """Segment candidates at each direction where the profile vanishes."""
    vals = tilde.values
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    tol = _VANISH_TOL * scale
    n = tilde.n
    mask = vals <= tol
    if not bool(np.any(mask)):
        return []
    # cluster contiguous grid zeros (with wraparound) and refine each
    idx = np.flatnonzero(mask)
    clusters = []
    current = [idx[0]]
    for i in idx[1:]:
        if i == current[-1] + 1:
            current.append(i)
        else:
            clusters.append(current)
            current = [i]
    clusters.append(current)
    if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == n - 1:
        clusters[0] = clusters.pop() + clusters[0]
    h = math.pi / n
    out = []
    for cluster in clusters:
        mid = cluster[len(cluster) // 2]
        lo = (mid - 1.5) * h
        hi = (mid + 1.5) * h
        eta0, fmin = golden_min(tilde.eval, lo, hi, tol=1e-14)
        # Newton steps on the spectral derivative: golden section stalls at
        # sqrt(eps) in the abscissa, and that noise leaks into the
        # off-diagonal coefficient of the segment candidate
        for _ in range(4):
            d1 = float(tilde.eval_derivative(eta0))
            dh = 1e-6
            d2 = (
                float(tilde.eval_derivative(eta0 + dh))
                - float(tilde.eval_derivative(eta0 - dh))
            ) / (2.0 * dh)
            if not (d2 > 0.0) or not math.isfinite(d1):
                break
            step = d1 / d2
            if abs(step) > h:
                break
            eta0 -= step
            if abs(step) < 1e-15 * max(1.0, abs(eta0)):
                break
        fmin = min(fmin, float(tilde.eval(eta0)))
        if fmin > tol:
            continue
        eta0 = eta0 % math.pi
        if eta0 < 1e-9 or eta0 > math.pi - 1e-9:
            eta0 = 0.0
        eng = _CoeffEngine(spec, tilde, eta0)
        # solve B(0, b) = 1 by homogeneity: B scales like b^{-(2+s)}
        _, B1, _ = eng.coeffs(0.0, 1.0)
        if B1 <= 0.0:
            continue
        expo = 0.5 if spec.logarithmic else 1.0 / (2.0 + spec.s)
        bv = B1 ** expo
        A, B, D = eng.coeffs(0.0, bv)
        if not (-_RESIDUAL_TOL <= A <= 1.0 + _RESIDUAL_TOL):
            continue
        if abs(B - 1.0) > _RESIDUAL_TOL or abs(D) > _RESIDUAL_TOL:
            continue
        out.append(_Candidate(eta=eta0, a=0.0, b=bv, engine=eng, degenerate=True))
    return out


def _bisect_eta_root(spec, tilde, lo, hi, glo):
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        cand = _proper_candidate(spec, tilde, mid)
        if cand is None:
            return None
        gmid = cand.coeffs()[2]
        if (gmid > 0.0) == (glo > 0.0):
            lo, glo = mid, gmid
        else:
            hi = mid
        if hi - lo < 1e-12:
            return _proper_candidate(spec, tilde, 0.5 * (lo + hi))
    return _proper_candidate(spec, tilde, 0.5 * (lo + hi))


def _canonical(cand: _Candidate, spec, tilde) -> _Candidate:
    """Reduce a proper candidate's angle to [0, pi/2) (swap axes if needed)."""
    if cand.degenerate:
        return cand
    eta = cand.eta % math.pi
    a, b = cand.a, cand.b
    if eta >= math.pi / 2.0 - 1e-12:
        eta = (eta - math.pi / 2.0) % math.pi
        a, b = b, a
    if abs(eta) < 1e-12 or abs(eta - math.pi) < 1e-12:
        eta = 0.0
    if eta == cand.eta and a == cand.a:
        return cand
    return _Candidate(eta=eta, a=a, b=b,
                      engine=_CoeffEngine(spec, tilde, eta))


def solve_ellipse(spec: PotentialSpec) -> EllipseSolution:
    """Find the balanced ellipse (``A = B = 1``, ``D = 0``) for ``spec``.

    The transformed profile must be nonnegative (otherwise no ellipse
    state is a minimizer and a :class:`RegimeError` is raised).  For
    asymmetric profiles the rotation angle is found by scanning the
    off-diagonal coefficient over ``[0, pi/2]`` and bisecting each sign
    change; every root is polished and the lowest-energy one returned
    (ties break toward smaller ``eta``).  Where the profile vanishes, the
    degenerate segment solution (``a = 0``, ``B = 1``, ``0 <= A <= 1``) is
    constructed and enters the same comparison.
    """
    tilde = spec.omega_tilde()
    vals = tilde.values
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    vmin = float(np.min(vals))
    if vmin < -_LIC_TOL * scale:
        raise RegimeError(
            "transformed profile is negative (min "
            f"{vmin:.6e}); ellipse states are not minimizers for this spec"
        )
    symmetric = spec.total_angle().symmetric
    if spec.s >= 1.0 and not symmetric:
        raise BranchError(
            "for 1 <= s < 2 the solver supports even profiles only"
        )
    candidates: list[_Candidate] = []
    if symmetric:
        cand = _proper_candidate(spec, tilde, 0.0)
        if cand is not None:
            candidates.append(cand)
    else:
        etas = np.linspace(0.0, math.pi / 2.0, _ETA_SCAN + 1)
        scan = [_proper_candidate(spec, tilde, float(e)) for e in etas]
        gs = [c.coeffs()[2] if c is not None else math.nan for c in scan]
        gtol = 1e-10 * max(1.0, scale)
        for i, cand in enumerate(scan):
            if cand is not None and abs(gs[i]) <= gtol:
                candidates.append(cand)
        for i in range(_ETA_SCAN):
            g0, g1 = gs[i], gs[i + 1]
            if math.isnan(g0) or math.isnan(g1):
                continue
            if abs(g0) <= gtol or abs(g1) <= gtol:
                continue
            if (g0 > 0.0) != (g1 > 0.0):
                root = _bisect_eta_root(
                    spec, tilde, float(etas[i]), float(etas[i + 1]), g0
                )
                if root is not None:
                    candidates.append(root)
    if vmin <= _VANISH_TOL * scale:
        candidates.extend(_degenerate_candidates(spec, tilde))
    if not candidates:
        raise NumericalError(
            "no balanced ellipse found: the aspect equation had no "
            f"admissible root (min profile {vmin:.3e}, scale {scale:.3e})"
        )
    candidates = [_canonical(c, spec, tilde) for c in candidates]
    # de-duplicate roots (the scan can find the same root twice)
    unique: list[_Candidate] = []
    for c in candidates:
        dup = False
        for u in unique:
            if (abs(c.eta - u.eta) < 1e-8
                    and abs(c.a - u.a) <= 1e-8 * (1.0 + u.a)
                    and abs(c.b - u.b) <= 1e-8 * (1.0 + u.b)):
                dup = True
                break
        if not dup:
            unique.append(c)
    scored = sorted(unique, key=lambda c: (c.energy(), c.eta))
    best = scored[0]
    A, B, D = best.coeffs()
    as_params = [
        EllipseParams(a=c.a, b=c.b, eta=c.eta + 0.0, degenerate=c.degenerate)
        for c in scored
    ]
    params = as_params[0]
    stationary = tuple(as_params)
    return EllipseSolution(
        params=params,
        coeffs=QuadCoeffs(A=A, B=B, D=D),
        energy=best.energy(),
        stationary_points=stationary,
    )


# -- potential constant, projections, geometry --------------------------------


def _log_inversion_constant(spec: PotentialSpec) -> float:
    """The additive constant tying the log profile to its transform.

    Equals ``integral(-ln|cos(theta - phi)|) * tilde(phi) dphi - Omega(theta)``
    (independent of ``theta``; evaluated at ``theta = 0``).
    """
    tilde = spec.omega_tilde()
    t1, w1 = graded_rule(0.5, 3.0, 40)
    t2, w2 = panel_rule(0.5, math.pi / 2.0, 16, 12)
    ts = np.concatenate([t1, t2])
    ws = np.concatenate([w1, w2])
    pair = tilde.eval(math.pi / 2.0 + ts) + tilde.eval(math.pi / 2.0 - ts)
    # split off the t=0 value so the log kernel meets a vanishing factor
    # (its moment over (0, pi/2) is (pi/2) ln 2 in closed form)
    pair0 = 2.0 * float(tilde.eval(math.pi / 2.0))
    integral = 2.0 * (
        float(np.sum(ws * (-np.log(np.sin(ts))) * (pair - pair0)))
        + pair0 * (math.pi / 2.0) * math.log(2.0)
    )
    omega0 = float(spec.total_angle().values[0])
    return integral - omega0


def potential_constant(spec: PotentialSpec, params: EllipseParams) -> float:
    """Value of the generated potential on the support of the minimizer."""
    a, b, eta = params.a, params.b, params.eta
    eng = _CoeffEngine(spec, spec.omega_tilde(), eta)
    if spec.logarithmic:
        A, B, _ = eng.coeffs(a, b)
        m = eng.mass(a, b)
        c0 = _log_inversion_constant(spec)
        return 0.5 + math.log(2.0) - c0 + m + 0.25 * (A * a * a + B * b * b)
    pc = profile_constants(spec.s)
    m = eng.mass(a, b)
    return (1.0 / spec.s + 1.0 / (4.0 + spec.s)) * pc.R2**2 * m


def physical_semiaxes(spec: PotentialSpec, params: EllipseParams) -> tuple[float, float]:
    """Semi-axes of the support in physical coordinates."""
    if spec.logarithmic:
        return params.a, params.b
    r2 = profile_constants(spec.s).R2
    return params.a * r2, params.b * r2


def project_ellipse(spec: PotentialSpec, params: EllipseParams, phi: float) -> float:
    """Scaling factor of the 1D pushforward onto the direction ``phi``.

    The projection of the ellipse state onto ``e_phi`` is the canonical 1D
    profile rescaled by ``lambda``: returns that ``lambda``.
    """
    if not spec.logarithmic and spec.s >= 1.0:
        raise BranchError(
            "the one-dimensional lift exists only for 0 <= s < 1"
        )
    pc = profile_constants(spec.s)
    d = phi - params.eta
    r = math.sqrt(
        (params.a * math.cos(d)) ** 2 + (params.b * math.sin(d)) ** 2
    )
    r_phys = r if spec.logarithmic else r * pc.R2
    if r_phys == 0.0:
        return math.inf
    return pc.R1 / r_phys


def boundary_polyline(spec: PotentialSpec, params: EllipseParams,
                      n_points: int = 128) -> np.ndarray:
    """Closed polyline tracing the support boundary in physical coordinates."""
    pa, pb = physical_semiaxes(spec, params)
    t = np.linspace(0.0, 2.0 * math.pi, n_points + 1)
    ce, se = math.cos(params.eta), math.sin(params.eta)
    x0, y0 = pa * np.cos(t), pb * np.sin(t)
    return np.column_stack([ce * x0 - se * y0, se * x0 + ce * y0])
