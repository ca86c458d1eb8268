"""Scalar special functions and the closed-form minimizer profiles.

Reference values in this module were computed with an independent
arbitrary-precision evaluation (50-digit working precision) of the same
closed forms, rounded to 20 significant digits.
"""
import math

import numpy as np
import pytest

from aniso2d import (
    BranchError,
    DomainError,
    eval_rho1,
    eval_rho2,
    gamma_angle,
    profile_constants,
    riesz_constants,
    support_radius_bound,
)
from aniso2d.specfun import beta, gamma

# Gamma(x) on a spread of arguments, including half-integers and integers.
GAMMA_REFS = [
    (0.1, 9.5135076986687318363),
    (0.3, 2.9915689876875906283),
    (0.5, 1.7724538509055160273),
    (0.7, 1.2980553326475577857),
    (0.9, 1.0686287021193193549),
    (1.1, 0.95135076986687318363),
    (1.4, 0.88726381750307528922),
    (1.5, 0.88622692545275801365),
    (1.7, 0.90863873285329044998),
    (2.0, 1.0),
    (2.3, 1.166711905198160345),
    (2.5, 1.3293403881791370205),
    (2.8, 1.676490787764436858),
    (3.0, 2.0),
    (3.3, 2.6834373819557687936),
    (3.6, 3.7170238530367914876),
    (4.0, 6.0),
    (4.3, 8.8553433604540370189),
    (4.7, 15.431411600047431712),
    (5.0, 24.0),
]

BETA_REFS = [
    (0.5, 1.7, 1.4617140861987293072),
    (0.5, 2.2, 1.2642661762862594288),
    (1.5, 1.7, 0.33220774686334756983),
    (0.3, 0.9, 3.4817962504991386879),
    (2.5, 3.1, 0.047460594401673821405),
    (1.0, 4.2, 0.23809523809523809524),
]

# Circle integral of |cos|**s, including the analytic continuation below
# s = -1 where the value goes negative.
GAMMA_ANGLE_REFS = [
    (0.0, 6.2831853071795864769),
    (0.5, 4.7925609389423688298),
    (1.0, 4.0),
    (1.5, 3.4960767390561597473),
    (2.0, 3.1415926535897932385),
    (-0.5, 10.488230217168479242),
    (-0.6, 12.537306248172072669),
    (-1.3, -10.325803923977024939),
    (-1.6, -3.3410607684542384166),
    (-1.7, -2.2548256653238844784),
]

# (s, c_s, tau_s): transform of the constant function and the
# inverse-transform normalization.
KERNEL_REFS = [
    (0.05, 0.0086733555164388893183, 17.705900051196851268),
    (0.2, 0.044953784831813568489, 3.0231720239631476068),
    (0.4, 0.12760163744144403695, 0.86035656571782981993),
    (0.5, 0.19068994087545329702, 0.5),
    (0.7, 0.38579543737460649595, 0.16278487961277806484),
    (0.9, 0.7323261984746377802, 0.031974031205535016312),
    (1.0, 1.0, 0.0),
    (1.4, 3.6430553179168504682, -0.039794187418179626872),
    (1.5, 5.2441151085842396209, -0.039788735772973833942),
]

# (s, tau_extended): continuation of tau_s * R1**(2+s) across s = 1.
TAU_EXT_REFS = [
    (0.4, 0.63997985636564005937),
    (0.9, 0.40594624796807410501),
    (1.0, 0.375),
    (1.4, 0.28263216871658426725),
    (1.9, 0.21271407013188708905),
]

# (s, R1, C1, V1, R2, C2) for the 1D branch; 1D fields None for s >= 1.
PROFILE_REFS = [
    (0.2, 0.54392235487413228632, 2.5227557621355232641,
     1.5496984806904935637, 0.36942591767106739916, 3.1309967635667306078),
    (0.4, 0.88400202805915684355, 0.91970752642943547323,
     2.1312534153073699727, 0.56731183492696278929, 1.4888774372445877122),
    (0.7, 1.4938359181939160071, 0.24287338537918888694,
     3.6627194688832232924, 0.81891082041716818187, 0.73696192378620972851),
    (0.9, 2.4020179815666812513, 0.058239341242313530655,
     7.5882549264997973093, 0.97671204430715532983, 0.49419136661153484466),
]

PROFILE_REFS_2D_ONLY = [
    (1.0, 1.0561535102556615488, 0.40528473456935108578),
    (1.4, 1.4123818446657009526, 0.1672868560343595751),
]

SUPPORT_BOUND_REFS = [
    (0.2, 2.640765639565014682),
    (0.4, 3.0968759046631437275),
    (0.7, 4.0598322145101643124),
    (0.0, 2.5483646349217283651),
]


@pytest.mark.parametrize("x, ref", GAMMA_REFS)
def test_gamma_reference_values(x, ref):
    assert gamma(x) == pytest.approx(ref, rel=1e-14)


def test_gamma_reflection_negative_arguments():
    # Gamma(-0.5) = -2 sqrt(pi), Gamma(-1.5) = 4 sqrt(pi) / 3.
    assert gamma(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-14)
    assert gamma(-1.5) == pytest.approx(4.0 * math.sqrt(math.pi) / 3.0, rel=1e-14)


def test_gamma_recurrence_property():
    for x in np.linspace(0.1, 4.9, 25):
        assert gamma(x + 1.0) == pytest.approx(x * gamma(x), rel=1e-12)


@pytest.mark.parametrize("p, q, ref", BETA_REFS)
def test_beta_reference_values(p, q, ref):
    assert beta(p, q) == pytest.approx(ref, rel=1e-13)


def test_beta_symmetry():
    for p, q in [(0.3, 1.7), (0.5, 0.5), (2.2, 0.9)]:
        assert beta(p, q) == pytest.approx(beta(q, p), rel=1e-14)


@pytest.mark.parametrize("s, ref", GAMMA_ANGLE_REFS)
def test_gamma_angle_reference_values(s, ref):
    assert gamma_angle(s) == pytest.approx(ref, rel=1e-13)


def test_gamma_angle_matches_quadrature():
    theta = np.linspace(0.0, 2.0 * math.pi, 200001)
    for s in (0.3, 0.8, 1.5):
        val = np.trapezoid(np.abs(np.cos(theta)) ** s, theta)
        assert gamma_angle(s) == pytest.approx(val, rel=1e-6)


def test_gamma_angle_domain_errors():
    with pytest.raises(DomainError):
        gamma_angle(-1.0)
    with pytest.raises(DomainError):
        gamma_angle(-2.0)
    with pytest.raises(DomainError):
        gamma_angle(-2.5)


@pytest.mark.parametrize("s, c_ref, tau_ref", KERNEL_REFS)
def test_kernel_constants(s, c_ref, tau_ref):
    consts = riesz_constants(s)
    assert consts.c_s == pytest.approx(c_ref, rel=1e-13)
    assert consts.tau_s == pytest.approx(tau_ref, rel=1e-13, abs=1e-15)


def test_tau_sign_change_at_one():
    assert riesz_constants(0.99).tau_s > 0.0
    assert riesz_constants(1.0).tau_s == 0.0
    assert riesz_constants(1.01).tau_s < 0.0


@pytest.mark.parametrize("s, ref", TAU_EXT_REFS)
def test_tau_extended_reference_values(s, ref):
    assert riesz_constants(s).tau_extended == pytest.approx(ref, rel=1e-13)


def test_tau_extended_matches_product_below_one():
    # On the 1D branch the continuation factors as tau_s * R1**(2+s).
    for s in (0.2, 0.4, 0.7, 0.9):
        consts = riesz_constants(s)
        prof = profile_constants(s)
        assert consts.tau_extended == pytest.approx(
            consts.tau_s * prof.R1 ** (2.0 + s), rel=1e-12
        )


def test_riesz_constants_domain():
    for bad in (0.0, 2.0, -0.3, 2.5):
        with pytest.raises(DomainError):
            riesz_constants(bad)


@pytest.mark.parametrize("s, R1, C1, V1, R2, C2", PROFILE_REFS)
def test_profile_constants_1d_branch(s, R1, C1, V1, R2, C2):
    prof = profile_constants(s)
    assert not prof.logarithmic
    assert prof.R1 == pytest.approx(R1, rel=1e-13)
    assert prof.C1 == pytest.approx(C1, rel=1e-13)
    assert prof.V1 == pytest.approx(V1, rel=1e-13)
    assert prof.R2 == pytest.approx(R2, rel=1e-13)
    assert prof.C2 == pytest.approx(C2, rel=1e-13)


@pytest.mark.parametrize("s, R2, C2", PROFILE_REFS_2D_ONLY)
def test_profile_constants_above_one(s, R2, C2):
    prof = profile_constants(s)
    assert prof.R1 is None and prof.C1 is None and prof.V1 is None
    assert prof.R2 == pytest.approx(R2, rel=1e-13)
    assert prof.C2 == pytest.approx(C2, rel=1e-13)


def test_profile_constants_logarithmic():
    prof = profile_constants(0.0)
    assert prof.logarithmic
    assert prof.R1 == 1.0
    assert prof.C1 == pytest.approx(2.0 / math.pi, rel=1e-15)
    assert prof.R2 == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert prof.C2 == pytest.approx(2.0 / math.pi, rel=1e-15)
    assert prof.V1 == pytest.approx(1.4431471805599453094, rel=1e-15)


def test_isotropic_radius_identity():
    # pi * tau_s * c_s * (R1/R2)**(2+s) = 1 ties all four constants together.
    for s in (0.1, 0.3, 0.5, 0.7, 0.9):
        consts = riesz_constants(s)
        prof = profile_constants(s)
        product = math.pi * consts.tau_s * consts.c_s * (prof.R1 / prof.R2) ** (2.0 + s)
        assert product == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("s", [0.0, 0.2, 0.4, 0.7, 0.9])
def test_rho1_unit_mass_and_second_moment(s):
    prof = profile_constants(s)
    x = np.linspace(-prof.R1, prof.R1, 400001)
    rho = eval_rho1(s, x)
    mass = np.trapezoid(rho, x)
    assert mass == pytest.approx(1.0, abs=5e-7)
    # Second moment of the 1D profile: R1^2 / (4 + s).
    m2 = np.trapezoid(rho * x * x, x)
    assert m2 == pytest.approx(prof.R1**2 / (4.0 + s), rel=1e-5)


@pytest.mark.parametrize("s", [0.0, 0.4, 0.9, 1.4])
def test_rho2_unit_mass(s):
    prof = profile_constants(s)
    r = np.linspace(0.0, prof.R2, 200001)
    pts = np.stack([r, np.zeros_like(r)], axis=-1)
    vals = eval_rho2(s, pts)
    mass = 2.0 * math.pi * np.trapezoid(vals * r, r)
    assert mass == pytest.approx(1.0, abs=2e-5)


def test_rho1_outside_support_and_branch():
    assert eval_rho1(0.4, 5.0) == 0.0
    assert eval_rho1(0.4, -5.0) == 0.0
    with pytest.raises(BranchError):
        eval_rho1(1.2, 0.0)


def test_rho2_shape_handling():
    v = eval_rho2(0.4, [0.1, 0.2])
    assert isinstance(v, float) and v > 0.0
    grid = eval_rho2(0.4, np.zeros((3, 4, 2)))
    assert grid.shape == (3, 4)
    with pytest.raises(DomainError):
        eval_rho2(0.4, np.zeros(3))


@pytest.mark.parametrize("s, ref", SUPPORT_BOUND_REFS)
def test_support_radius_bound(s, ref):
    assert support_radius_bound(s) == pytest.approx(ref, rel=1e-13)


def test_support_radius_bound_branch_error():
    with pytest.raises(BranchError):
        support_radius_bound(1.3)
