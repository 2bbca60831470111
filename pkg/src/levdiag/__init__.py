"""Regression leverage diagnostics.

Computes per-row leverages and squared Mahalanobis distances for a design
matrix and attributes each high-leverage value to its sources through two
exact splits: a per-regressor attribution (collinearity inflation x scaled
auxiliary residual x marginal z-score) and the leverage change under
removal of any single regressor.
"""

from .auxreg import AuxRegression, PermutedFactors, aux_regression, multiple_correlation, standardized_aux_residual
from .decomposition import (
    DecompositionIIResult,
    DecompositionITerm,
    decomposition_one,
    decomposition_two,
    inverse_cov_via_permutations,
    leverage_drop,
    partitioned_inverse,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .leverage import LeverageRecord, default_threshold, hat_diagonal_oracle, leverage, mahalanobis_sq
from .linalg import (
    CenteredData,
    CholeskyPair,
    DataMatrix,
    TranspositionPerm,
    apply_transposition,
    center,
    cholesky,
    covariance,
    direct_inverse,
)
from .synthetic import ScenarioSpec, generate, sweep_leverage

__version__ = "0.1.0"

__all__ = [
    "AuxRegression",
    "CenteredData",
    "CholeskyPair",
    "DataMatrix",
    "DecompositionIIResult",
    "DecompositionITerm",
    "KERNEL_BACKEND",
    "LeverageRecord",
    "PermutedFactors",
    "ScenarioSpec",
    "TranspositionPerm",
    "apply_transposition",
    "aux_regression",
    "center",
    "cholesky",
    "covariance",
    "decomposition_one",
    "decomposition_two",
    "default_threshold",
    "direct_inverse",
    "generate",
    "hat_diagonal_oracle",
    "inverse_cov_via_permutations",
    "leverage",
    "leverage_drop",
    "mahalanobis_sq",
    "multiple_correlation",
    "partitioned_inverse",
    "standardized_aux_residual",
    "sweep_leverage",
]
