"""Sparse variable selection: best subset search, IHT and recoverability diagnostics."""

from .bss import BssResult, best_subset, best_subset_on_support, near_best_margin
from .comparators import (
    PenaltySpec,
    SelectionPath,
    cross_validate,
    lambda_grid,
    penalized_path,
    sis,
    tpr_fdr_curve,
)
from .core import (
    BudgetExceededError,
    Dataset,
    DegenerateColumnError,
    FitResult,
    IngestionError,
    InvalidArgumentError,
    InvalidCovarianceError,
    OverParameterizedError,
    SelectionError,
    SelectionMetrics,
    SingularBlockError,
    fdr,
    selection_metrics,
    standardize_columns,
    tpr,
)
from .diagnostics import beta_min_threshold, irrepresentable, kappa, lambda_m, tau_star, tau_sup
from .iht import IhtConfig, IhtResult, gradient, iht_run, loss, two_stage
from .linalg import conditional_cov, ols_fit, restricted_eigs, rss
from .simgen import CovarianceSpec, SimConfig, corner_case, gen_beta, gen_covariance, sample_dataset

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
