"""Gradient flow on the ellipse family: stationarity, dissipation, order."""
import math

import pytest

from aniso2d import (
    AngleFunction,
    BranchError,
    FlowState,
    PotentialSpec,
    builtin_angle_function,
    ellipse_energy,
    integrate_flow,
    profile_constants,
    quad_coeffs,
    solve_ellipse,
    step_flow,
)
import numpy as np

COS2_SPEC = PotentialSpec.parametrized(0.4, builtin_angle_function("cos2"), 0.5)


def _iso(s: float = 0.4) -> PotentialSpec:
    return PotentialSpec.direct(s, AngleFunction(np.ones(512)))


def test_isotropic_energy_at_disk():
    scaled, physical = ellipse_energy(_iso(0.4), 1.0, 1.0)
    assert scaled == pytest.approx(2.4, rel=1e-13)
    pc = profile_constants(0.4)
    assert physical == pytest.approx(
        (pc.R2 / pc.R1) ** 2 * pc.V1 * scaled / 2.4, rel=1e-13
    )
    # E(1,1) = 2 + s holds across the branch
    for s in (0.2, 0.7, 0.9):
        scaled_s, _ = ellipse_energy(_iso(s), 1.0, 1.0)
        assert scaled_s == pytest.approx(2.0 + s, rel=1e-12)


def test_flow_converges_to_solver_solution():
    sol = solve_ellipse(COS2_SPEC)
    traj = integrate_flow(COS2_SPEC, (1.2, 0.7, 0.0))
    final = traj[-1]
    assert final.derivative_norm < 1e-10
    assert final.a == pytest.approx(sol.params.a, abs=1e-8)
    assert final.b == pytest.approx(sol.params.b, abs=1e-8)
    assert final.energy == pytest.approx(sol.energy, rel=1e-12)


def test_flow_isotropic_converges_to_disk():
    traj = integrate_flow(_iso(0.4), (1.4, 0.6, 0.0))
    final = traj[-1]
    assert final.a == pytest.approx(1.0, abs=1e-8)
    assert final.b == pytest.approx(1.0, abs=1e-8)
    assert final.energy == pytest.approx(2.4, rel=1e-10)


def test_flow_stationary_at_balance():
    sol = solve_ellipse(COS2_SPEC)
    traj = integrate_flow(COS2_SPEC, (sol.params.a, sol.params.b, 0.0))
    assert len(traj) <= 2
    assert traj[-1].a == pytest.approx(sol.params.a, rel=1e-9)
    assert traj[-1].b == pytest.approx(sol.params.b, rel=1e-9)


def test_energy_monotone_along_flow():
    traj = integrate_flow(COS2_SPEC, (1.2, 0.7, 0.0))
    for prev, cur in zip(traj, traj[1:]):
        assert cur.energy <= prev.energy + 1e-13 * max(1.0, abs(prev.energy))
    # time strictly increases and starts at 0
    assert traj[0].t == 0.0
    for prev, cur in zip(traj, traj[1:]):
        assert cur.t > prev.t


def test_dissipation_identity():
    # dE/dt = -2 s (a^2 (A-1)^2 + b^2 (B-1)^2), checked by centered difference
    a, b, s = 1.1, 0.8, 0.4
    st = FlowState(t=0.0, a=a, b=b, eta=0.0, energy=0.0, derivative_norm=1.0)
    dt = 1e-4
    plus = step_flow(COS2_SPEC, st, dt)
    minus = step_flow(COS2_SPEC, st, -dt)
    rate = (plus.energy - minus.energy) / (2.0 * dt)
    c = quad_coeffs(COS2_SPEC, a, b)
    ident = -2.0 * s * (a * a * (c.A - 1.0) ** 2 + b * b * (c.B - 1.0) ** 2)
    assert rate == pytest.approx(ident, rel=1e-5)


def test_rk4_fourth_order():
    def run_fixed(dt, t_end=0.4):
        st = FlowState(t=0.0, a=1.3, b=0.9, eta=0.0, energy=0.0, derivative_norm=1.0)
        for _ in range(round(t_end / dt)):
            st = step_flow(COS2_SPEC, st, dt)
        return st

    ref = run_fixed(0.002)
    coarse = run_fixed(0.04)
    fine = run_fixed(0.02)
    e_coarse = math.hypot(coarse.a - ref.a, coarse.b - ref.b)
    e_fine = math.hypot(fine.a - ref.a, fine.b - ref.b)
    ratio = e_coarse / e_fine
    assert 11.0 < ratio < 25.0  # halving dt cuts the error ~16x


def test_resume_from_state():
    traj = integrate_flow(COS2_SPEC, (1.2, 0.7, 0.0), t_end=1.0)
    resumed = integrate_flow(COS2_SPEC, traj[-1], t_end=2.0)
    assert resumed[0].t == pytest.approx(traj[-1].t)
    assert resumed[-1].t == pytest.approx(2.0)
    # matches a straight run to the same horizon (up to restarted step sizes)
    direct = integrate_flow(COS2_SPEC, (1.2, 0.7, 0.0), t_end=2.0)
    assert resumed[-1].a == pytest.approx(direct[-1].a, abs=1e-5)
    assert resumed[-1].b == pytest.approx(direct[-1].b, abs=1e-5)


def test_branch_errors():
    logspec = PotentialSpec.parametrized(0.0, builtin_angle_function("cos2"), 0.5)
    with pytest.raises(BranchError):
        integrate_flow(logspec, (1.0, 1.0, 0.0))
    with pytest.raises(BranchError):
        integrate_flow(_iso(1.4), (1.0, 1.0, 0.0))
    with pytest.raises(BranchError):
        ellipse_energy(_iso(0.4), 0.0, 1.0)


def test_csv_row_format():
    st = FlowState(t=0.5, a=1.25, b=0.75, eta=0.1, energy=2.5, derivative_norm=1e-3)
    fields = st.csv_row().split(",")
    assert len(fields) == 6
    assert [float(f) for f in fields] == [0.5, 1.25, 0.75, 0.1, 2.5, 1e-3]
    # full precision survives the round trip
    st2 = FlowState(t=1.0 / 3.0, a=math.pi, b=1.0, eta=0.0, energy=0.0,
                    derivative_norm=0.0)
    assert float(st2.csv_row().split(",")[1]) == math.pi
