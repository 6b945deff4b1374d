"""attnopt: exact optimal dynamic attention allocation across correlated
Gaussian information sources, with an independent convex oracle and three
worked applications (binary choice, biased-news competition, attention
manipulation)."""

from ._kernels import backend
from .assumptions import AssumptionReport, Verdict, classify
from .core import (
    AttentionVector,
    PosteriorState,
    Problem,
    gamma,
    grad_hessian,
    posterior_covariance,
    posterior_variance,
)
from .oracle import (
    MonotonicityReport,
    OracleResult,
    constrained_t_optimal,
    monotonicity_scan,
    t_optimal,
    t_optimal_enumerated,
)
from .stages import (
    Stage,
    StagePath,
    beta_of_t,
    discretize_policy,
    k2_closed_form,
    n_of_t,
    sample_path,
    solve_stages,
    transformed_weights,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionReport",
    "AttentionVector",
    "MonotonicityReport",
    "OracleResult",
    "PosteriorState",
    "Problem",
    "Stage",
    "StagePath",
    "Verdict",
    "backend",
    "beta_of_t",
    "classify",
    "constrained_t_optimal",
    "discretize_policy",
    "gamma",
    "grad_hessian",
    "k2_closed_form",
    "monotonicity_scan",
    "n_of_t",
    "posterior_covariance",
    "posterior_variance",
    "sample_path",
    "solve_stages",
    "t_optimal",
    "t_optimal_enumerated",
    "transformed_weights",
]
