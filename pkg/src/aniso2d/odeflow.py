"""Gradient flow on the ellipse family.

Restricting the interaction energy to normalized ellipse states turns the
full evolution into a three-dimensional ODE for the semi-axis factors and
the rotation angle:

    a' = 2 a (A(a,b) - 1)
    b' = 2 b (B(a,b) - 1)
    eta' = 2 D(a,b) (a^2 + b^2) / (a^2 - b^2)

whose stationary points are exactly the balanced ellipses of
:func:`aniso2d.ellipse.solve_ellipse`.  The rescaled energy

    E_scaled = M(a,b) + (s/2)(a^2 + b^2),   M = a^2 A + b^2 B

is a Lyapunov function: along solutions
``dE/dt = -2s (a^2 (A-1)^2 + b^2 (B-1)^2) <= 0``.

The integrator is classical RK4 with an energy monitor: any step that
increases the energy is redone at half the step size, and accepted steps
grow the step gently.  At ``a = b`` the rotation angle is unidentifiable
(the ellipse is a ball), so the angle is frozen whenever
``|a^2 - b^2| < 1e-8 (a^2 + b^2)``; profiles that are even in the angle
keep ``eta`` frozen throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._errors import BranchError, NumericalError
from .anglefn import PotentialSpec
from .ellipse import _CoeffEngine
from .specfun import profile_constants

__all__ = [
    "FlowState",
    "ellipse_energy",
    "step_flow",
    "integrate_flow",
]

_ETA_FREEZE = 1e-8
_DT0 = 1e-2
_DT_MAX = 0.1
_DT_GROWTH = 1.2
_STOP_TOL = 1e-10
_T_END = 50.0
_MAX_HALVINGS = 50


@dataclass(frozen=True)
class FlowState:
    """One point of an ellipse-flow trajectory."""

    t: float
    a: float
    b: float
    eta: float
    energy: float
    derivative_norm: float

    def csv_row(self) -> str:
        return (
            f"{self.t:.17g},{self.a:.17g},{self.b:.17g},"
            f"{self.eta:.17g},{self.energy:.17g},{self.derivative_norm:.17g}"
        )


def _require_flow_branch(spec: PotentialSpec):
    if spec.logarithmic or not 0.0 < spec.s < 1.0:
        raise BranchError(
            f"the ellipse flow is defined for 0 < s < 1 (got s={spec.s})"
        )


def ellipse_energy(spec: PotentialSpec, a: float, b: float,
                   eta: float = 0.0) -> tuple[float, float]:
    """Rescaled energy and physical interaction energy of an ellipse state.

    Returns ``(E_scaled, E_physical)`` where the physical value applies the
    branch conversion constant ``(R1/R2)^{-2} V1 / (2+s)``.
    """
    _require_flow_branch(spec)
    if a <= 0.0 or b <= 0.0:
        raise BranchError("ellipse_energy needs a, b > 0")
    eng = _CoeffEngine(spec, spec.omega_tilde(), eta)
    scaled = eng.energy(a, b)
    pc = profile_constants(spec.s)
    physical = (pc.R1 / pc.R2) ** (-2.0) * pc.V1 * scaled / (2.0 + spec.s)
    return scaled, physical


class _Flow:
    """Right-hand side and energy for one spec (profile shift cached per eta)."""

    def __init__(self, spec: PotentialSpec):
        _require_flow_branch(spec)
        self.spec = spec
        self.tilde = spec.omega_tilde()
        self.freeze_eta = spec.total_angle().symmetric
        self._eng_cache: tuple[float, _CoeffEngine] | None = None

    def engine(self, eta: float) -> _CoeffEngine:
        if self._eng_cache is not None and self._eng_cache[0] == eta:
            return self._eng_cache[1]
        eng = _CoeffEngine(self.spec, self.tilde, eta)
        self._eng_cache = (eta, eng)
        return eng

    def rhs(self, a: float, b: float, eta: float):
        if a <= 0.0 or b <= 0.0:
            raise NumericalError(
                f"flow left the admissible region: a={a}, b={b}"
            )
        A, B, D = self.engine(eta).coeffs(a, b)
        da = 2.0 * a * (A - 1.0)
        db = 2.0 * b * (B - 1.0)
        diff = a * a - b * b
        if self.freeze_eta or abs(diff) < _ETA_FREEZE * (a * a + b * b):
            deta = 0.0
        else:
            deta = 2.0 * D * (a * a + b * b) / diff
        return da, db, deta

    def energy(self, a: float, b: float, eta: float) -> float:
        return self.engine(eta).energy(a, b)

    def state(self, t: float, a: float, b: float, eta: float) -> FlowState:
        da, db, deta = self.rhs(a, b, eta)
        dnorm = math.sqrt(da * da + db * db + (a * b * deta) ** 2)
        return FlowState(t=t, a=a, b=b, eta=eta,
                         energy=self.energy(a, b, eta),
                         derivative_norm=dnorm)


def _rk4(flow: _Flow, a: float, b: float, eta: float, dt: float):
    k1 = flow.rhs(a, b, eta)
    k2 = flow.rhs(a + 0.5 * dt * k1[0], b + 0.5 * dt * k1[1],
                  eta + 0.5 * dt * k1[2])
    k3 = flow.rhs(a + 0.5 * dt * k2[0], b + 0.5 * dt * k2[1],
                  eta + 0.5 * dt * k2[2])
    k4 = flow.rhs(a + dt * k3[0], b + dt * k3[1], eta + dt * k3[2])
    a1 = a + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    b1 = b + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    e1 = eta + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    return a1, b1, e1


def step_flow(spec: PotentialSpec, state: FlowState, dt: float) -> FlowState:
    """One classical RK4 step of the ellipse flow (no adaptivity)."""
    flow = _Flow(spec)
    a1, b1, e1 = _rk4(flow, state.a, state.b, state.eta, dt)
    return flow.state(state.t + dt, a1, b1, e1)


def integrate_flow(
    spec: PotentialSpec,
    initial: tuple[float, float, float] | FlowState,
    t_end: float = _T_END,
    stop_tol: float = _STOP_TOL,
    dt0: float = _DT0,
) -> list[FlowState]:
    """Integrate the ellipse flow until stationarity or ``t_end``.

    ``initial`` is ``(a, b, eta)`` or a :class:`FlowState` to resume from.
    Steps that increase the energy are halved and redone; accepted steps
    grow by 1.2x up to 0.1.  Integration stops once the derivative norm
    ``sqrt(a'^2 + b'^2 + (a b eta')^2)`` drops below ``stop_tol``.
    """
    flow = _Flow(spec)
    if isinstance(initial, FlowState):
        t, a, b, eta = initial.t, initial.a, initial.b, initial.eta
    else:
        a, b, eta = initial
        t = 0.0
    trajectory = [flow.state(t, a, b, eta)]
    dt = dt0
    slack = 1e-13
    while t < t_end and trajectory[-1].derivative_norm >= stop_tol:
        dt = min(dt, t_end - t)
        current = trajectory[-1]
        for halving in range(_MAX_HALVINGS + 1):
            a1, b1, e1 = _rk4(flow, current.a, current.b, current.eta, dt)
            energy1 = flow.energy(a1, b1, e1)
            if energy1 <= current.energy + slack * max(1.0, abs(current.energy)):
                break
            dt *= 0.5
        else:
            raise NumericalError(
                f"energy monitor could not accept a step at t={t} "
                f"(dt={dt}, energy={current.energy})"
            )
        t += dt
        trajectory.append(flow.state(t, a1, b1, e1))
        dt = min(dt * _DT_GROWTH, _DT_MAX)
    return trajectory
