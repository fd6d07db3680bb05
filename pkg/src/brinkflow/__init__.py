"""Pseudo-spectral Galerkin solver for incompressible flow on the torus with
nonlinear damping, pumping, and a regularized nonsmooth body-force law,
plus the diagnostics that check its energy balance, a-priori bounds, and
contraction estimates.
"""

__version__ = "0.1.0"

from .spectral import (
    SpectralField,
    PhysicalField,
    leray_project,
    to_physical,
    to_spectral,
    norm,
    smoothing_filter,
)
from .operators import OperatorParams, stokes_apply, trilinear_b, convection_B, damping_C, pumping_Ctilde, drift_F
from .laws import (
    PiecewiseAffineLaw,
    RegularizedLaw,
    MollifierSpec,
    envelopes,
    clarke_interval,
    mollify,
    lemma_sign_constants,
    potential_j,
    directional_j0,
    verify_hypotheses,
    zigzag_example,
)
from .solver import SimConfig, ForcingSpec, InitialConditionSpec, integrate, taylor_green_ic
from .diagnostics import (
    energy_balance_residual,
    apriori_margin,
    gronwall_constants,
    contraction_study,
    hvi_residual,
    convergence_study,
)

__all__ = [
    "SpectralField",
    "PhysicalField",
    "leray_project",
    "to_physical",
    "to_spectral",
    "norm",
    "smoothing_filter",
    "OperatorParams",
    "stokes_apply",
    "trilinear_b",
    "convection_B",
    "damping_C",
    "pumping_Ctilde",
    "drift_F",
    "PiecewiseAffineLaw",
    "RegularizedLaw",
    "MollifierSpec",
    "envelopes",
    "clarke_interval",
    "mollify",
    "lemma_sign_constants",
    "potential_j",
    "directional_j0",
    "verify_hypotheses",
    "zigzag_example",
    "SimConfig",
    "ForcingSpec",
    "InitialConditionSpec",
    "integrate",
    "taylor_green_ic",
    "energy_balance_residual",
    "apriori_margin",
    "gronwall_constants",
    "contraction_study",
    "hvi_residual",
    "convergence_study",
]
