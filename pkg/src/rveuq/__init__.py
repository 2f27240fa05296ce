"""Periodic fiber-composite homogenization with a PCE-based UQ pipeline."""

from .materials import (TransverseIsotropicMaterial, isotropic, rotate_stiffness,
                        stiffness_from_engineering)
from .microstructure import (GeometryParams, VoxelRVE, laminate_rve, plan_cell,
                             ply_fiber_fractions, uniform_rve, voxelize)
from .fem import (CorrectorSolution, HomogenizedStiffness, PeriodicMesh, assemble,
                  build_mesh, homogenize, localization_operator, localize_stress,
                  solve_correctors, voigt_reuss_bounds)
from .sampling import DesignOfExperiments, lhs
from .pca import PCAModel, fit_pca, flatten, reconstruct, transform, unflatten
from .pce import PCEModel, build_basis, evaluate, fit_lar, legendre_orthonormal, moments
from .sobol import SobolIndices, sobol_from_pce
from .pipeline import ExperimentConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "TransverseIsotropicMaterial", "isotropic", "rotate_stiffness",
    "stiffness_from_engineering",
    "GeometryParams", "VoxelRVE", "laminate_rve", "plan_cell",
    "ply_fiber_fractions", "uniform_rve", "voxelize",
    "CorrectorSolution", "HomogenizedStiffness", "PeriodicMesh", "assemble",
    "build_mesh", "homogenize", "localization_operator", "localize_stress",
    "solve_correctors", "voigt_reuss_bounds",
    "DesignOfExperiments", "lhs",
    "PCAModel", "fit_pca", "flatten", "reconstruct", "transform", "unflatten",
    "PCEModel", "build_basis", "evaluate", "fit_lar", "legendre_orthonormal",
    "moments",
    "SobolIndices", "sobol_from_pce",
    "ExperimentConfig", "load_config",
]
