"""Regime classification against closed-form critical couplings.

For the power-law branch the transform acts on the Fourier mode
``cos(2k theta)`` as multiplication by ``(-1)^k prod_{j<k} ((2-s)/2+j)/(s/2+j)``
(relative to the constant mode), and for the logarithmic branch by
``(-1)^k 2k``.  All reference values below follow by hand from those
multipliers on the polynomial builtins:

* s = 0.4: modes map with factors -4 (k=1) and +6 (k=2), so
  cos2 -> alpha_L = alpha_L0 = 2/3, cos4 -> alpha_L = 24/25,
  alpha_L0 = 8/7, argmin at arccos(2/3)/2; cos2sin2 -> 8/5 with a tie
  between 0 and pi/2; the mixture cos4 + cos2/10 -> alpha_L =
  1/1.131666..., alpha_L0 = 1/1.025, argmin at arccos(11/15)/2.
* cos2 at general s: alpha_L = s/(1-s).
* logarithmic: cos2 -> (1, 1); cos4 -> (4/3, 2) with argmin pi/6.
"""
import math

import numpy as np
import pytest

from aniso2d import (
    AngleFunction,
    BranchError,
    InvalidInputError,
    PotentialSpec,
    builtin_angle_function,
    classify,
    critical_alphas,
    is_lic,
    riesz_constants,
    zigzag_angle,
)


def _spec(name: str, s: float, alpha: float) -> PotentialSpec:
    return PotentialSpec.parametrized(s, builtin_angle_function(name), alpha)


CRITICAL_REFS = [
    # (name, s, alpha_L, alpha_L0)
    ("cos2", 0.4, 2.0 / 3.0, 2.0 / 3.0),
    ("cos2", 0.7, 7.0 / 3.0, 7.0 / 3.0),
    ("cos4", 0.4, 0.96, 8.0 / 7.0),
    ("cos2sin2", 0.4, 1.6, 1.6),
    ("cos4_plus_tenth_cos2", 0.4, 0.8836524300441826215, 0.97560975609756097561),
    ("cos2", 0.0, 1.0, 1.0),
    ("cos4", 0.0, 4.0 / 3.0, 2.0),
]


@pytest.mark.parametrize("name, s, a_l, a_l0", CRITICAL_REFS)
def test_critical_alphas_closed_forms(name, s, a_l, a_l0):
    got_l, got_l0 = critical_alphas(_spec(name, s, 0.1))
    assert got_l == pytest.approx(a_l, rel=1e-10)
    assert got_l0 == pytest.approx(a_l0, rel=1e-10)


def test_cos2_critical_follows_s():
    for s in (0.2, 0.5, 0.9):
        a_l, a_l0 = critical_alphas(_spec("cos2", s, 0.1))
        assert a_l == pytest.approx(s / (1.0 - s), rel=1e-10)
        assert a_l0 == pytest.approx(a_l, rel=1e-10)


ZIGZAG_REFS = [
    ("cos4", 0.4, 0.42053433528396512789),          # arccos(2/3) / 2
    ("cos4_plus_tenth_cos2", 0.4, 0.3737921748345103989),  # arccos(11/15) / 2
    ("cos4", 0.0, math.pi / 6.0),
]


@pytest.mark.parametrize("name, s, angle", ZIGZAG_REFS)
def test_zigzag_angle_closed_forms(name, s, angle):
    assert zigzag_angle(_spec(name, s, 1.0)) == pytest.approx(angle, abs=1e-9)


def test_zigzag_none_when_argmin_on_axis():
    assert zigzag_angle(_spec("cos2", 0.4, 1.0)) is None
    # tie between 0 and pi/2 breaks toward the axis
    assert zigzag_angle(_spec("cos2sin2", 0.4, 1.0)) is None


def test_argmin_tie_reported_as_set():
    rep = classify(_spec("cos2sin2", 0.4, 1.0))
    assert len(rep.argmin_set) == 2
    assert rep.argmin_set[0] == pytest.approx(0.0, abs=1e-6)
    assert rep.argmin_set[1] == pytest.approx(math.pi / 2.0, abs=1e-6)


def test_tilde_min_tracks_alpha_linearly():
    # parametrized transform is c_s (1 + alpha * unit); cos4 unit min -25/24
    c_s = riesz_constants(0.4).c_s
    for alpha in (0.5, 1.0, 2.0):
        rep = classify(_spec("cos4", 0.4, alpha))
        assert rep.omega_tilde_min == pytest.approx(
            c_s * (1.0 - alpha * 25.0 / 24.0), rel=1e-9
        )


REGIME_REFS = [
    ("cos4", 0.4, 0.5, "LIC_ellipse"),
    ("cos4", 0.4, 0.96, "LIC_ellipse"),        # boundary counts as admissible
    ("cos4", 0.4, 1.0, "nonLIC_no_vertical"),
    ("cos4", 0.4, 2.0, "nonLIC_concentrating"),
    ("cos4", 0.0, 1.0, "LIC_ellipse"),
    ("cos4", 0.0, 1.5, "nonLIC_no_vertical"),
    ("cos4", 0.0, 3.0, "nonLIC_concentrating"),
    ("cos4", 1.4, 5.0, "always_LIC"),
]


@pytest.mark.parametrize("name, s, alpha, regime", REGIME_REFS)
def test_regime_labels(name, s, alpha, regime):
    assert classify(_spec(name, s, alpha)).regime == regime


def test_always_lic_reports_infinite_criticals():
    rep = classify(_spec("cos4", 1.4, 5.0))
    assert rep.alpha_L == math.inf and rep.alpha_L0 == math.inf
    assert rep.zigzag_angle is None


def test_argmin_phi_canonical_off_axis():
    rep = classify(_spec("cos4", 0.4, 2.0))
    assert rep.argmin_phi == pytest.approx(0.42053433528396512789, abs=1e-9)


def test_alpha_star_unknown_with_lower_bound():
    rep = classify(_spec("cos4", 0.4, 1.0))
    assert rep.alpha_star is None
    assert rep.alpha_star_lower_bound == rep.alpha_L


def test_degeneracy_order_and_1d_flag():
    assert classify(_spec("cos2", 0.4, 0.5)).degeneracy_order == pytest.approx(
        2.0, abs=0.05
    )
    rep4 = classify(_spec("cos4", 0.4, 0.5))
    assert rep4.degeneracy_order == pytest.approx(4.0, abs=0.05)
    assert rep4.rho1d_never_minimizer
    assert not classify(_spec("cos2", 0.4, 0.5)).rho1d_never_minimizer
    # the mixture vanishes quadratically (the cos2 part dominates at pi/2)
    mix = classify(_spec("cos4_plus_tenth_cos2", 0.4, 0.5))
    assert mix.degeneracy_order == pytest.approx(2.0, abs=0.1)
    assert not mix.rho1d_never_minimizer


def test_scaling_covariance_of_criticals():
    om = builtin_angle_function("cos4")
    doubled = AngleFunction(2.0 * om.values, symmetric=True)
    base = critical_alphas(PotentialSpec.parametrized(0.4, om, 1.0))
    scaled = critical_alphas(PotentialSpec.parametrized(0.4, doubled, 1.0))
    assert scaled[0] == pytest.approx(base[0] / 2.0, rel=1e-12)
    assert scaled[1] == pytest.approx(base[1] / 2.0, rel=1e-12)


def test_is_lic_isotropic_and_boolean_protocol():
    iso = PotentialSpec.direct(0.4, AngleFunction(np.ones(256)))
    res = is_lic(iso)
    assert res and res.holds
    assert res.omega_tilde_min == pytest.approx(riesz_constants(0.4).c_s, rel=1e-12)
    bad = is_lic(_spec("cos4", 0.4, 2.0))
    assert not bad and bad.omega_tilde_min < 0.0


def test_error_types():
    direct = PotentialSpec.direct(0.4, AngleFunction(np.ones(128) + 0.5))
    with pytest.raises(InvalidInputError):
        critical_alphas(direct)
    with pytest.raises(InvalidInputError):
        zigzag_angle(direct)
    high = _spec("cos4", 1.2, 1.0)
    with pytest.raises(BranchError):
        critical_alphas(high)
    with pytest.raises(BranchError):
        zigzag_angle(high)


def test_report_json_schema():
    data = classify(_spec("cos4", 0.4, 1.0)).to_json_dict()
    expected = {
        "s", "alpha", "alpha_L", "alpha_L0", "regime", "omega_tilde_min",
        "argmin_phi", "zigzag_angle", "alpha_star", "alpha_star_lower_bound",
        "rho1d_never_minimizer", "degeneracy_order", "argmin_set",
    }
    assert set(data) == expected
    assert data["alpha_star"] is None
    assert isinstance(data["argmin_set"], list)
