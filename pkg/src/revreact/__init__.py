"""Numerical laboratory for the reversible reaction aU + bV <-> cW with diffusion.

Simulates the mass-action reaction-diffusion system on [0,1] with a
positivity-preserving IMEX finite-volume scheme, computes the detailed-balance
equilibrium, and estimates the constants in the entropy / entropy-dissipation
and Csiszar-Kullback inequalities that drive exponential relaxation.
"""

from .model import (
    ReactionParams,
    MassPair,
    Equilibrium,
    RescaleReport,
    rescale_params,
    compute_equilibrium,
    equilibrium_residual,
)
from .grid import Grid1D, integrate, laplacian_neumann, fisher_information
from .solver import (
    State,
    StepConfig,
    Trajectory,
    StepUnderflowError,
    reaction_rate,
    step_imex,
    run,
    z_linf,
)
from .entropy import EntropyReport, entropy, relative_entropy, dissipation, ck_gap
from .ineqlab import (
    AdmissibleSample,
    RatioReport,
    homogeneous_ratio,
    scan_homogeneous_ratio,
    sample_admissible,
    estimate_k2_split,
    estimate_eed_constant,
    trajectory_eed_constant,
    verify_csiszar_kullback,
    duality_margin,
)
from .cli import fit_rate

__all__ = [
    "ReactionParams",
    "MassPair",
    "Equilibrium",
    "RescaleReport",
    "rescale_params",
    "compute_equilibrium",
    "equilibrium_residual",
    "Grid1D",
    "integrate",
    "laplacian_neumann",
    "fisher_information",
    "State",
    "StepConfig",
    "Trajectory",
    "StepUnderflowError",
    "reaction_rate",
    "step_imex",
    "run",
    "z_linf",
    "EntropyReport",
    "entropy",
    "relative_entropy",
    "dissipation",
    "ck_gap",
    "AdmissibleSample",
    "RatioReport",
    "homogeneous_ratio",
    "scan_homogeneous_ratio",
    "sample_admissible",
    "estimate_k2_split",
    "estimate_eed_constant",
    "trajectory_eed_constant",
    "verify_csiszar_kullback",
    "duality_margin",
    "fit_rate",
]

__version__ = "0.1.0"
