"""Functional-family normed spaces, minimal projections onto hyperplanes, and
the constants that bound their distance from one."""

from .bounds import EpsilonLedger, compute_ledger, corollary_bound, corollary_inputs, ledger_checks, threshold_t0
from .errors import ProjConstError
from .minproj import (
    MinProjResult,
    Projection,
    minimal_projection_search,
    projection_norm_estimate,
    proof_chain_replay,
    smoothness_gap_check,
)
from .numerics import LogScalar
from .optimize import SearchConfig
from .params import AlphaMode, BetaMode, Case, alpha_estimate, beta_estimate, classify_hyperplane, exclusivity_check
from .space import (
    FunctionalFamily,
    Hyperplane,
    dual_norm,
    norm_eval,
    norm_gradient,
    quotient_distance,
    restricted_dual_norm,
    span_distance,
    supporting_functional,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaMode",
    "BetaMode",
    "Case",
    "EpsilonLedger",
    "FunctionalFamily",
    "Hyperplane",
    "LogScalar",
    "MinProjResult",
    "ProjConstError",
    "Projection",
    "SearchConfig",
    "alpha_estimate",
    "beta_estimate",
    "classify_hyperplane",
    "compute_ledger",
    "corollary_bound",
    "corollary_inputs",
    "dual_norm",
    "exclusivity_check",
    "ledger_checks",
    "minimal_projection_search",
    "norm_eval",
    "norm_gradient",
    "projection_norm_estimate",
    "proof_chain_replay",
    "quotient_distance",
    "restricted_dual_norm",
    "smoothness_gap_check",
    "span_distance",
    "supporting_functional",
    "threshold_t0",
]
