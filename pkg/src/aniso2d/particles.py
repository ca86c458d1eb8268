"""Particle gradient flow for the anisotropic interaction energy.

Simulates N planar particles under

    dx_j/dt = -(1/N) * sum_{k != j} grad W(x_j - x_k)

with forward Euler and an adaptive step: a trial step is rejected (and the
step halved) when the energy increases or any pair gets closer than 1e-9.
The particle energy is 1/(2 N^2) * sum_{j != k} W(x_j - x_k); across
accepted steps it never increases, and the run stops once it stabilizes.

Pair interactions are evaluated in chunked vectorized passes with a fixed
summation order, so results are bit-reproducible for a given seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ._errors import DomainError, InvalidInputError, NumericalError
from ._rng import Xoshiro256pp
from .anglefn import PotentialSpec

__all__ = [
    "ParticleEnsemble",
    "SimConfig",
    "SimResult",
    "grad_W",
    "init_uniform",
    "simulate",
    "diagnostics",
]

_MIN_PAIR_DISTANCE = 1e-9     # trial steps keep every pair at least this far apart
_OVERLAP_EPS = 1e-12          # treated as coincident at init
_JITTER = 1e-6
_MAX_HALVINGS = 40
_CHUNK = 256
_DIAG_SEED_SALT = 0xD1A6A057


@dataclass
class ParticleEnsemble:
    """Positions plus bookkeeping of one simulation state."""

    positions: np.ndarray
    energy: float
    step: float
    step_count: int
    rng_seed: int

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise InvalidInputError("positions must be an (N, 2) array, N >= 1")
        self.positions = pos

    @property
    def N(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class SimConfig:
    energy_tol: float = 1e-5
    n_max: int = 20000
    dt0: float = 0.01
    dt_min: float = 1e-12
    dt_max: float = 0.05
    deterministic_reduction: bool = True
    seed: int = 0

    def __post_init__(self):
        if not self.energy_tol > 0.0:
            raise InvalidInputError("energy_tol must be positive")
        if self.n_max < 1:
            raise InvalidInputError("n_max must be at least 1")
        if not (0.0 < self.dt_min <= self.dt0 <= self.dt_max):
            raise InvalidInputError("need 0 < dt_min <= dt0 <= dt_max")

    def to_json_dict(self) -> dict:
        return {
            "energy_tol": self.energy_tol,
            "n_max": self.n_max,
            "dt0": self.dt0,
            "dt_min": self.dt_min,
            "dt_max": self.dt_max,
            "deterministic_reduction": self.deterministic_reduction,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SimResult:
    ensemble: ParticleEnsemble
    energy_history: np.ndarray
    termination: str  # "energy_converged" | "max_steps" | "stalled"


class _PairKernel:
    """Chunked pair-interaction evaluator for one potential spec.

    The angle profile enters through its trigonometric modes; cos(2k*theta)
    and sin(2k*theta) of each separation vector are built by the double-angle
    recurrence from cos(2*theta) = (dx^2-dy^2)/r^2 and sin(2*theta) =
    2*dx*dy/r^2, so no transcendental calls appear in the inner loop.
    """

    def __init__(self, spec: PotentialSpec):
        total = spec.total_angle()
        scale = float(np.max(np.abs(total.values)))
        const, ks, cos_c, sin_c = total.real_modes(tol=1e-14 if scale else 0.0)
        self.s = spec.s
        self.logarithmic = spec.logarithmic
        self.const = float(const)
        self.ks = [int(k) for k in ks]
        self.cos_c = [float(c) for c in cos_c]
        self.sin_c = [float(c) for c in sin_c]
        self.kmax = max(self.ks, default=0)

    def _angle_values(self, dx, dy, inv_r2):
        """(Omega, Omega') on an array of separations."""
        omega = np.full(dx.shape, self.const)
        domega = np.zeros(dx.shape)
        if not self.ks:
            return omega, domega
        c1 = (dx * dx - dy * dy) * inv_r2
        s1 = 2.0 * dx * dy * inv_r2
        ck, sk = c1, s1
        wanted = {k: i for i, k in enumerate(self.ks)}
        for k in range(1, self.kmax + 1):
            if k > 1:
                ck, sk = ck * c1 - sk * s1, sk * c1 + ck * s1
            i = wanted.get(k)
            if i is not None:
                a, b = self.cos_c[i], self.sin_c[i]
                omega += a * ck + b * sk
                domega += 2.0 * k * (b * ck - a * sk)
        return omega, domega

    def forces(self, pos: np.ndarray) -> np.ndarray:
        """Per-particle velocities -(1/N) sum_k grad W(x_j - x_k)."""
        n = pos.shape[0]
        out = np.empty_like(pos)
        x, y = pos[:, 0], pos[:, 1]
        for lo in range(0, n, _CHUNK):
            hi = min(lo + _CHUNK, n)
            dx = x[lo:hi, None] - x[None, :]
            dy = y[lo:hi, None] - y[None, :]
            r2 = dx * dx + dy * dy
            idx = np.arange(lo, hi)
            r2[idx - lo, idx] = np.inf  # mask self-interaction
            inv_r2 = 1.0 / r2
            omega, domega = self._angle_values(dx, dy, inv_r2)
            if self.logarithmic:
                radial = inv_r2
                gx = -(dx + domega * dy) * radial
                gy = -(dy - domega * dx) * radial
            else:
                s = self.s
                radial = inv_r2 ** (0.5 * s + 1.0)
                gx = (-s * omega * dx - domega * dy) * radial
                gy = (-s * omega * dy + domega * dx) * radial
            gx += 2.0 * dx
            gy += 2.0 * dy
            # the diagonal contributes exactly 0 through the inf mask
            out[lo:hi, 0] = np.sum(gx, axis=1)
            out[lo:hi, 1] = np.sum(gy, axis=1)
        return -out / n

    def energy_and_min_dist(self, pos: np.ndarray) -> tuple[float, float]:
        """(pair energy 1/(2N^2) sum_{j!=k} W, minimum pair distance)."""
        n = pos.shape[0]
        x, y = pos[:, 0], pos[:, 1]
        total = 0.0
        min_r2 = math.inf
        for lo in range(0, n, _CHUNK):
            hi = min(lo + _CHUNK, n)
            dx = x[lo:hi, None] - x[None, :]
            dy = y[lo:hi, None] - y[None, :]
            r2 = dx * dx + dy * dy
            idx = np.arange(lo, hi)
            r2[idx - lo, idx] = np.inf
            chunk_min = float(np.min(r2)) if n > 1 else math.inf
            if chunk_min < min_r2:
                min_r2 = chunk_min
            inv_r2 = 1.0 / r2
            omega, _ = self._angle_values(dx, dy, inv_r2)
            if self.logarithmic:
                # the masked diagonal hits -inf + inf; it is zeroed below
                with np.errstate(divide="ignore", invalid="ignore"):
                    w = 0.5 * np.log(inv_r2) + omega + r2
            else:
                w = inv_r2 ** (0.5 * self.s) * omega + r2
            w[idx - lo, idx] = 0.0  # r2=inf made these inf or nan
            total += float(np.sum(w))
        return total / (2.0 * n * n), math.sqrt(min_r2) if n > 1 else math.inf


def grad_W(spec: PotentialSpec, x) -> np.ndarray:
    """Gradient of the pair potential at a single nonzero planar point."""
    vec = np.asarray(x, dtype=float)
    if vec.shape != (2,):
        raise InvalidInputError("x must be a planar vector")
    if vec[0] == 0.0 and vec[1] == 0.0:
        raise DomainError("grad_W is singular at the origin")
    kernel = _PairKernel(spec)
    pos = np.array([[0.0, 0.0], vec])
    # force on particle 1 from particle 0 is -(1/2) grad W(x), by the flow law
    return -2.0 * kernel.forces(pos)[1]


def init_uniform(N: int, seed: int) -> ParticleEnsemble:
    """I.i.d. uniform positions on [-1/2, 1/2]^2, reproducible from seed.

    Any pair closer than 1e-9 is jittered by 1e-6-scale uniform offsets
    until separated, so the simulator never starts on a singularity.
    """
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    rng = Xoshiro256pp(seed)
    pts = rng.uniform(-0.5, 0.5, 2 * N).reshape(N, 2)
    for _ in range(100):
        close = _close_pairs(pts, _MIN_PAIR_DISTANCE)
        if not close:
            break
        for i in close:
            pts[i] += rng.uniform(-_JITTER, _JITTER, 2)
    return ParticleEnsemble(
        positions=pts, energy=math.nan, step=0.0, step_count=0, rng_seed=int(seed)
    )


def _close_pairs(pts: np.ndarray, tol: float) -> list[int]:
    """Indices of the second member of each too-close pair."""
    n = pts.shape[0]
    out = []
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        d = pts[lo:hi, None, :] - pts[None, :, :]
        r2 = np.sum(d * d, axis=2)
        idx = np.arange(lo, hi)
        r2[idx - lo, idx] = np.inf
        rows, cols = np.nonzero(r2 < tol * tol)
        for r, c in zip(rows, cols):
            if lo + r > c:  # report each pair once, through its later index
                out.append(lo + int(r))
    return sorted(set(out))


def simulate(spec: PotentialSpec, ensemble: ParticleEnsemble,
             config: SimConfig | None = None) -> SimResult:
    """Run the adaptive forward-Euler flow until the energy stabilizes.

    Terminates with ``energy_converged`` when the energy change across an
    accepted step drops below ``config.energy_tol``, with ``max_steps``
    after ``config.n_max`` accepted steps, or with ``stalled`` when no
    acceptable step exists above ``config.dt_min``.
    """
    if config is None:
        config = SimConfig()
    kernel = _PairKernel(spec)
    pos = np.array(ensemble.positions, dtype=float)
    n = pos.shape[0]
    energy, min_dist = kernel.energy_and_min_dist(pos)
    if n > 1 and min_dist < _OVERLAP_EPS:
        raise NumericalError("coincident particles at start of run")
    history = [energy]
    dt = config.dt0
    termination = "max_steps"
    steps_done = 0
    for _ in range(config.n_max):
        vel = kernel.forces(pos)
        accepted = False
        for _ in range(_MAX_HALVINGS + 1):
            if dt < config.dt_min:
                break
            trial = pos + dt * vel
            e_new, min_dist = kernel.energy_and_min_dist(trial)
            if min_dist < _MIN_PAIR_DISTANCE or not e_new <= energy:
                dt *= 0.5
                continue
            accepted = True
            break
        if not accepted:
            termination = "stalled"
            break
        pos = trial
        delta = energy - e_new
        energy = e_new
        history.append(energy)
        steps_done += 1
        dt = min(dt * 1.2, config.dt_max)
        if abs(delta) < config.energy_tol:
            termination = "energy_converged"
            break
    final = ParticleEnsemble(
        positions=pos,
        energy=energy,
        step=dt,
        step_count=ensemble.step_count + steps_done,
        rng_seed=ensemble.rng_seed,
    )
    return SimResult(final, np.array(history), termination)


# -- diagnostics -------------------------------------------------------------

def _principal_angle(nbhd: np.ndarray) -> tuple[float | None, float]:
    """(undirected line angle, thinness ratio) of a point cloud's principal
    axis; angle is None for a degenerate cloud."""
    centered = nbhd - np.mean(nbhd, axis=0)
    cov = centered.T @ centered / len(nbhd)
    evals, evecs = np.linalg.eigh(cov)
    lam2, lam1 = float(evals[0]), float(evals[1])
    if lam1 <= 0.0:
        return None, 1.0
    beta = math.atan2(float(evecs[1, 1]), float(evecs[0, 1])) % math.pi
    return beta, math.sqrt(max(lam2, 0.0) / lam1)


def _angle_gap(a: float, b: float) -> float:
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _local_line_fits(pts: np.ndarray, seed: int, n_trials: int = 128,
                     k_small: int = 8, k_large: int = 13,
                     thinness: float = 0.25, agreement: float = math.radians(3.0)):
    """Slopes of line-like local neighborhoods (RANSAC-style sampling).

    Each trial picks a random anchor and fits a principal axis to its
    nearest neighbors at two scales; the fit is kept only when both clouds
    are thin (secondary/primary spread below ``thinness``) and their angles
    agree, which rejects segment ends and junctions.  Returned angles are
    tilts from the vertical axis in (-pi/2, pi/2].
    """
    n = pts.shape[0]
    if n < k_large:
        return []
    rng = Xoshiro256pp((seed ^ _DIAG_SEED_SALT) & ((1 << 64) - 1))
    slopes = []
    for _ in range(n_trials):
        anchor = pts[rng.integer_below(n)]
        d2 = np.sum((pts - anchor) ** 2, axis=1)
        order = np.argsort(d2, kind="stable")
        beta1, thin1 = _principal_angle(pts[order[:k_small]])
        beta2, thin2 = _principal_angle(pts[order[:k_large]])
        if beta1 is None or beta2 is None:
            continue
        if thin1 > thinness or thin2 > thinness:
            continue
        if _angle_gap(beta1, beta2) > agreement:
            continue
        tilt = beta2 - math.pi / 2.0
        if tilt <= -math.pi / 2.0:
            tilt += math.pi
        slopes.append(tilt)
    return slopes


def diagnostics(ensemble: ParticleEnsemble) -> dict:
    """Support-geometry summary of an ensemble, measured after centering:
    half-width max|x1|, half-height max|x2|, support radius max|x|, and
    the slopes of line-like local clusters (tilt from vertical, radians)."""
    pts = np.asarray(ensemble.positions, dtype=float)
    if pts.shape[0] < 1:
        raise InvalidInputError("diagnostics needs a nonempty ensemble")
    centered = pts - np.mean(pts, axis=0)
    return {
        "width": float(np.max(np.abs(centered[:, 0]))),
        "height": float(np.max(np.abs(centered[:, 1]))),
        "support_radius": float(np.max(np.hypot(centered[:, 0], centered[:, 1]))),
        "fitted_segment_slopes": _local_line_fits(centered, ensemble.rng_seed),
    }
