"""Planar anisotropic attractive-repulsive interaction energies.

Tools for the potential family ``W(x) = |x|^(-s) * Omega(theta) + |x|^2``
(and its logarithmic limit): angle transforms, critical-coupling
classification, ellipse-supported minimizers, the semi-axis gradient flow,
particle gradient-flow simulation, and segment-stability analytics.
"""
from ._errors import (
    AnisoError,
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
    forward_transform_plain,
    inverse_transform,
    log_inverse_transform,
    log_transform,
    scaled_family_transform,
)
from .specfun import (
    ProfileConstants,
    RieszConstants,
    eval_rho1,
    eval_rho2,
    gamma_angle,
    profile_constants,
    riesz_constants,
    support_radius_bound,
)
from .regimes import LicResult, RegimeReport, classify, critical_alphas, is_lic, zigzag_angle
from .ellipse import (
    EllipseParams,
    EllipseSolution,
    QuadCoeffs,
    boundary_polyline,
    interaction_integral,
    physical_semiaxes,
    potential_constant,
    project_ellipse,
    quad_coeffs,
    quad_coeffs_high_s,
    scaled_energy,
    solve_ellipse,
)
from .odeflow import FlowState, ellipse_energy, integrate_flow, step_flow
from .particles import (
    ParticleEnsemble,
    SimConfig,
    SimResult,
    diagnostics,
    grad_W,
    init_uniform,
    simulate,
)
from .stability import (
    StabilityReport,
    comparison_potential,
    defect_direct_check,
    perturbation_coefficient,
    perturbation_sweep,
    stability_report,
    vertical_defect,
    width_scaling_fit,
)
from .cli import ExperimentConfig

__version__ = "1.0.0"

__all__ = [
    "AngleFunction",
    "AnisoError",
    "BUILTIN_ANGLE_FUNCTIONS",
    "BranchError",
    "DivergenceError",
    "DomainError",
    "EllipseParams",
    "EllipseSolution",
    "ExperimentConfig",
    "FlowState",
    "InvalidInputError",
    "LicResult",
    "NumericalError",
    "ParticleEnsemble",
    "PotentialSpec",
    "ProfileConstants",
    "QuadCoeffs",
    "RegimeError",
    "RegimeReport",
    "RieszConstants",
    "SimConfig",
    "SimResult",
    "StabilityReport",
    "boundary_polyline",
    "interaction_integral",
    "scaled_energy",
    "builtin_angle_function",
    "classify",
    "comparison_potential",
    "critical_alphas",
    "defect_direct_check",
    "diagnostics",
    "ellipse_energy",
    "eval_rho1",
    "eval_rho2",
    "forward_transform",
    "forward_transform_plain",
    "gamma_angle",
    "grad_W",
    "init_uniform",
    "integrate_flow",
    "inverse_transform",
    "is_lic",
    "log_inverse_transform",
    "log_transform",
    "perturbation_coefficient",
    "perturbation_sweep",
    "physical_semiaxes",
    "potential_constant",
    "profile_constants",
    "project_ellipse",
    "quad_coeffs",
    "quad_coeffs_high_s",
    "riesz_constants",
    "scaled_family_transform",
    "simulate",
    "solve_ellipse",
    "stability_report",
    "step_flow",
    "support_radius_bound",
    "vertical_defect",
    "width_scaling_fit",
    "zigzag_angle",
]
