"""Command-line surface: transforms, classification, solvers, simulations,
stability analytics, and figure-data emission (CSV/JSON/SVG).

Exit codes: 0 success, 2 invalid usage or invalid inputs, 3 numerical
failure.  All numbers are emitted with 17 significant digits; non-finite
values become JSON null.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from ._errors import (
    BranchError,
    DivergenceError,
    DomainError,
    InvalidInputError,
    NumericalError,
    RegimeError,
)
from .anglefn import (
    AngleFunction,
    BUILTIN_ANGLE_FUNCTIONS,
    PotentialSpec,
    builtin_angle_function,
    forward_transform,
    log_transform,
)
from .ellipse import boundary_polyline, solve_ellipse
from .odeflow import integrate_flow
from .particles import SimConfig, diagnostics, init_uniform, simulate
from .regimes import classify
from .specfun import profile_constants
from .stability import stability_report

__all__ = ["ExperimentConfig", "main"]

_EXIT_USAGE = 2
_EXIT_NUMERICAL = 3
_USAGE_ERRORS = (DomainError, BranchError, InvalidInputError)
_NUMERICAL_ERRORS = (RegimeError, DivergenceError, NumericalError)

_OMEGA_HELP = (
    "angle function: "
    + "|".join(sorted(BUILTIN_ANGLE_FUNCTIONS))
    + "|file:<path>"
)


# -- formatting helpers --------------------------------------------------------


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _json_ready(obj):
    """Recursively convert to JSON-safe values: numpy scalars to Python,
    non-finite floats to null."""
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def _dump_json(data, out_path: str | None):
    text = json.dumps(_json_ready(data), indent=2)
    _write_text(out_path, text + "\n")


def _write_text(out_path: str | None, text: str):
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        parent = os.path.dirname(os.path.abspath(out_path))
        os.makedirs(parent, exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _csv_text(header: str, rows) -> str:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


# -- spec construction ---------------------------------------------------------


def _load_omega(name: str) -> AngleFunction:
    if name.startswith("file:"):
        path = name[len("file:"):]
        data = None
        last_parse_error = None
        # whitespace columns, comma columns, or comma columns with a header
        # line (the transform subcommand's own output format)
        for kwargs in ({"delimiter": None}, {"delimiter": ","},
                       {"delimiter": ",", "skiprows": 1}):
            try:
                data = np.loadtxt(path, **kwargs)
                break
            except OSError as exc:
                raise InvalidInputError(f"cannot read angle-function file: {exc}")
            except ValueError as exc:
                last_parse_error = exc
        if data is None:
            raise InvalidInputError(
                f"cannot parse angle-function file: {last_parse_error}"
            )
        if data.ndim == 2:
            data = data[:, -1]  # accept "phi,value" tables; values are last
        return AngleFunction(data)
    return builtin_angle_function(name)


def _build_spec(s: float, omega_name: str, alpha: float, direct: bool) -> PotentialSpec:
    omega = _load_omega(omega_name)
    if direct:
        return PotentialSpec.direct(s, omega)
    return PotentialSpec.parametrized(s, omega, alpha)


def _spec_from_args(args) -> PotentialSpec:
    return _build_spec(args.s, args.omega, args.alpha, getattr(args, "direct", False))


# -- SVG writer -----------------------------------------------------------------

_SVG_SIZE = 600.0
_SVG_MARGIN = 0.05
_DOT_RADIUS = 1.5


def _svg_panel(points: np.ndarray, boundary: np.ndarray | None,
               dash_height: float | None) -> str:
    """Scatter panel with optional predicted-support overlay and dashed
    horizontal lines at +-dash_height; equal-aspect, 5% margin."""
    xs = [points[:, 0]]
    ys = [points[:, 1]]
    if boundary is not None:
        xs.append(boundary[:, 0])
        ys.append(boundary[:, 1])
    if dash_height is not None:
        ys.append(np.array([dash_height, -dash_height]))
    all_x = np.concatenate(xs)
    all_y = np.concatenate(ys)
    cx = 0.5 * (float(np.max(all_x)) + float(np.min(all_x)))
    cy = 0.5 * (float(np.max(all_y)) + float(np.min(all_y)))
    half = 0.5 * max(float(np.max(all_x) - np.min(all_x)),
                     float(np.max(all_y) - np.min(all_y)))
    half = max(half, 1e-9) * (1.0 + _SVG_MARGIN)
    scale = _SVG_SIZE / (2.0 * half)

    def px(x):
        return (x - cx) * scale + 0.5 * _SVG_SIZE

    def py(y):
        return 0.5 * _SVG_SIZE - (y - cy) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_SVG_SIZE:g} '
        f'{_SVG_SIZE:g}" width="{_SVG_SIZE:g}" height="{_SVG_SIZE:g}">',
        f'<rect width="{_SVG_SIZE:g}" height="{_SVG_SIZE:g}" fill="white"/>',
    ]
    if dash_height is not None:
        for y in (dash_height, -dash_height):
            parts.append(
                f'<line x1="0" y1="{py(y):.4f}" x2="{_SVG_SIZE:g}" '
                f'y2="{py(y):.4f}" stroke="#888888" stroke-width="1" '
                f'stroke-dasharray="6 4"/>'
            )
    if boundary is not None:
        pts = " ".join(f"{px(x):.4f},{py(y):.4f}" for x, y in boundary)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="#1f77b4" '
            f'stroke-width="1.5"/>'
        )
    for x, y in points:
        parts.append(
            f'<circle cx="{px(x):.4f}" cy="{py(y):.4f}" r="{_DOT_RADIUS:g}" '
            f'fill="#222222"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _predicted_overlay(spec: PotentialSpec):
    """(boundary polyline | None, dash height | None) for a spec."""
    boundary = None
    try:
        sol = solve_ellipse(spec)
        boundary = boundary_polyline(spec, sol.params)
    except (RegimeError, BranchError, DivergenceError, NumericalError):
        pass
    dash = None
    if spec.logarithmic or 0.0 < spec.s < 1.0:
        dash = profile_constants(spec.s).R1
    return boundary, dash


# -- experiment configuration ----------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """One alpha-sweep experiment: spec family, simulation settings, outputs."""

    s: float
    omega: str
    alphas: tuple = (0.0,)
    sim: SimConfig = field(default_factory=SimConfig)
    n: int = 1600
    outputs: str = "aniso2d_report"
    emit_svg: bool = True

    def __post_init__(self):
        if not 0.0 <= self.s < 2.0:
            raise InvalidInputError(f"s must be in [0, 2), got {self.s}")
        if len(self.alphas) == 0:
            raise InvalidInputError("alpha list must be nonempty")
        if self.n < 1:
            raise InvalidInputError("particle count must be positive")
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))

    def to_json_dict(self) -> dict:
        return {
            "spec": {"s": self.s, "omega": self.omega, "alpha": list(self.alphas)},
            "sim": self.sim.to_json_dict(),
            "n": self.n,
            "outputs": self.outputs,
            "emit_svg": self.emit_svg,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            spec = data["spec"]
            sim_data = dict(data.get("sim", {}))
            return cls(
                s=float(spec["s"]),
                omega=str(spec["omega"]),
                alphas=tuple(float(a) for a in spec["alpha"]),
                sim=SimConfig(**sim_data),
                n=int(data.get("n", 1600)),
                outputs=str(data.get("outputs", "aniso2d_report")),
                emit_svg=bool(data.get("emit_svg", True)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidInputError):
                raise
            raise InvalidInputError(f"malformed experiment config: {exc!r}")


def _thread_budget() -> int:
    raw = os.environ.get("ANISO_THREADS", "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise InvalidInputError(f"ANISO_THREADS must be an integer, got {raw!r}")
        if n < 1:
            raise InvalidInputError("ANISO_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


# -- subcommands -----------------------------------------------------------------


def cmd_transform(args) -> int:
    omega = _load_omega(args.omega)
    if args.log or args.s == 0.0:
        tilde = log_transform(omega)
    else:
        tilde = forward_transform(omega, args.s)
    rows = zip(tilde.theta, tilde.values)
    _write_text(args.out, _csv_text("phi,omega_tilde", rows))
    return 0


def cmd_classify(args) -> int:
    report = classify(_spec_from_args(args))
    _dump_json(report.to_json_dict(), args.out)
    return 0


def cmd_ellipse(args) -> int:
    spec = _spec_from_args(args)
    sol = solve_ellipse(spec)
    payload = {
        "params": sol.params.to_json_dict(),
        "coeffs": {"A": sol.coeffs.A, "B": sol.coeffs.B, "D": sol.coeffs.D},
        "energy": sol.energy,
        "stationary_points": [p.to_json_dict() for p in sol.stationary_points],
    }
    _dump_json(payload, args.out)
    if args.boundary_out is not None:
        boundary = boundary_polyline(spec, sol.params)
        _write_text(args.boundary_out, _csv_text("x1,x2", boundary))
    return 0


def cmd_flow(args) -> int:
    spec = _spec_from_args(args)
    trajectory = integrate_flow(
        spec, (args.a0, args.b0, args.eta0), t_end=args.t_end
    )
    text = "t,a,b,eta,energy,dnorm\n" + "\n".join(
        st.csv_row() for st in trajectory
    ) + "\n"
    _write_text(args.out, text)
    return 0


def _run_simulation(spec: PotentialSpec, n: int, cfg: SimConfig):
    ensemble = init_uniform(n, cfg.seed)
    result = simulate(spec, ensemble, cfg)
    diag = diagnostics(result.ensemble)
    summary = {
        "seed": cfg.seed,
        "steps": result.ensemble.step_count,
        "final_energy": result.ensemble.energy,
        "width": diag["width"],
        "height": diag["height"],
        "support_radius": diag["support_radius"],
        "termination": result.termination,
    }
    return result, summary


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    cfg = SimConfig(energy_tol=args.energy_tol, n_max=args.n_max, seed=args.seed)
    result, summary = _run_simulation(spec, args.n, cfg)
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    snapshot = os.path.join(out_dir, "snapshot.csv")
    _write_text(snapshot, _csv_text("x1,x2", result.ensemble.positions))
    metadata = {
        "spec": {"s": spec.s, "omega": args.omega,
                 "alpha": spec.alpha if spec.mode == "parametrized" else None},
        "config": cfg.to_json_dict(),
        "simulation": summary,
    }
    _dump_json(metadata, os.path.join(out_dir, "metadata.json"))
    if args.svg:
        boundary, dash = _predicted_overlay(spec)
        svg = _svg_panel(result.ensemble.positions, boundary, dash)
        _write_text(os.path.join(out_dir, "snapshot.svg"), svg)
    _dump_json(metadata, None)
    return 0


def cmd_stability(args) -> int:
    spec = _spec_from_args(args)
    report = stability_report(spec, m_max=args.cm_max)
    _dump_json(report.to_json_dict(), args.out)
    return 0


def _report_panel(config: ExperimentConfig, index: int, alpha: float) -> dict:
    spec = _build_spec(config.s, config.omega, alpha, direct=False)
    record = {
        "spec": {"s": config.s, "omega": config.omega, "alpha": alpha},
        "regime": classify(spec).to_json_dict(),
        "ellipse": None,
        "stability": None,
    }
    boundary = None
    try:
        sol = solve_ellipse(spec)
        record["ellipse"] = sol.params.to_json_dict()
        boundary = boundary_polyline(spec, sol.params)
    except (RegimeError, BranchError, DivergenceError, NumericalError):
        pass
    try:
        record["stability"] = stability_report(spec).to_json_dict()
    except BranchError:
        pass
    result, summary = _run_simulation(spec, config.n, config.sim)
    record["simulation"] = summary
    if config.emit_svg:
        dash = None
        if spec.logarithmic or 0.0 < spec.s < 1.0:
            dash = profile_constants(spec.s).R1
        svg = _svg_panel(result.ensemble.positions, boundary, dash)
        _write_text(
            os.path.join(config.outputs, f"panel_{index:02d}.svg"), svg
        )
    return record


def cmd_report(args) -> int:
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = ExperimentConfig.from_json_dict(json.load(fh))
        except OSError as exc:
            raise InvalidInputError(f"cannot read config: {exc}")
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config is not valid JSON: {exc}")
    else:
        if args.s is None or args.omega is None:
            raise InvalidInputError("report needs --config or --s/--omega")
        config = ExperimentConfig(s=args.s, omega=args.omega)
    # flag overrides
    updates = {}
    if args.s is not None and args.config is not None:
        updates["s"] = args.s
    if args.omega is not None and args.config is not None:
        updates["omega"] = args.omega
    if args.alpha:
        updates["alphas"] = tuple(args.alpha)
    if args.n is not None:
        updates["n"] = args.n
    if args.seed is not None:
        updates["sim"] = SimConfig(**{**config.sim.to_json_dict(), "seed": args.seed})
    if args.outputs is not None:
        updates["outputs"] = args.outputs
    if args.no_svg:
        updates["emit_svg"] = False
    if updates:
        base = {
            "s": config.s, "omega": config.omega, "alphas": config.alphas,
            "sim": config.sim, "n": config.n, "outputs": config.outputs,
            "emit_svg": config.emit_svg,
        }
        base.update(updates)
        config = ExperimentConfig(**base)

    os.makedirs(config.outputs, exist_ok=True)
    workers = min(_thread_budget(), len(config.alphas))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_report_panel, config, i, alpha)
                for i, alpha in enumerate(config.alphas)
            ]
            panels = [f.result() for f in futures]
    else:
        panels = [
            _report_panel(config, i, alpha)
            for i, alpha in enumerate(config.alphas)
        ]
    merged = {"config": config.to_json_dict(), "panels": panels}
    _dump_json(merged, os.path.join(config.outputs, "report.json"))
    _dump_json(merged, None)
    return 0


# -- argument parsing --------------------------------------------------------------


def _add_spec_flags(sp, with_alpha: bool = True):
    sp.add_argument("--s", type=float, required=True,
                    help="kernel exponent in [0, 2); 0 is the logarithmic branch")
    sp.add_argument("--omega", required=True, help=_OMEGA_HELP)
    if with_alpha:
        sp.add_argument("--alpha", type=float, default=0.0,
                        help="anisotropy strength (default 0)")
        sp.add_argument("--direct", action="store_true",
                        help="treat --omega as the full angle profile "
                             "(ignores --alpha)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aniso2d",
        description="Minimizers of planar anisotropic attractive-repulsive "
                    "interaction energies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("transform", help="angle transform of a profile")
    sp.add_argument("--s", type=float, default=0.0)
    sp.add_argument("--omega", required=True, help=_OMEGA_HELP)
    sp.add_argument("--log", action="store_true",
                    help="use the logarithmic-kernel transform")
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("classify", help="regime classification")
    _add_spec_flags(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("ellipse", help="solve for the ellipse minimizer")
    _add_spec_flags(sp)
    sp.add_argument("--out", default=None)
    sp.add_argument("--boundary-out", default=None,
                    help="also write the support boundary polyline CSV")
    sp.set_defaults(func=cmd_ellipse)

    sp = sub.add_parser("flow", help="integrate the semi-axis gradient flow")
    _add_spec_flags(sp)
    sp.add_argument("--a0", type=float, required=True)
    sp.add_argument("--b0", type=float, required=True)
    sp.add_argument("--eta0", type=float, default=0.0)
    sp.add_argument("--t-end", type=float, default=50.0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_flow)

    sp = sub.add_parser("simulate", help="particle gradient-flow simulation")
    _add_spec_flags(sp)
    sp.add_argument("--n", type=int, default=1600, help="particle count")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--energy-tol", type=float, default=1e-5)
    sp.add_argument("--n-max", type=int, default=20000)
    sp.add_argument("--out-dir", default="aniso2d_sim")
    sp.add_argument("--svg", action="store_true", help="also write an SVG panel")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("stability", help="segment-stability analytics")
    _add_spec_flags(sp)
    sp.add_argument("--cm-max", type=int, default=32,
                    help="highest perturbation frequency in the sweep")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_stability)

    sp = sub.add_parser("report", help="alpha-sweep report with SVG panels")
    sp.add_argument("--config", default=None,
                    help="ExperimentConfig JSON file; flags override its values")
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--omega", default=None, help=_OMEGA_HELP)
    sp.add_argument("--alpha", type=float, action="append", default=None,
                    help="may be given multiple times")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--outputs", default=None, help="output directory")
    sp.add_argument("--no-svg", action="store_true")
    sp.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"aniso2d {args.command}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return _EXIT_USAGE
    except _NUMERICAL_ERRORS as exc:
        print(f"aniso2d {args.command}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
