"""Capacity bounds and message-splitting achievable rates for fixed
Gaussian MIMO relay channels."""

from .channel import RelayChannel, Topology, angle_between, make_angle_channel
from .linalg import (NumericalDomainError, log_det_plus_identity,
                     project_psd_trace, schur_conditional_cov)
from .mc import MCEstimate, estimate_mi, grid_search_scalar
from .optimize import (BoundResult, OptimizerConfig, decode_profile, maximize,
                       optimize_lower_bound, optimize_strategy,
                       optimize_upper_bound)
from .rates import (CovarianceProfile, RateBreakdown, UpperBoundVars,
                    achievable_rate, cutset_broadcast_term, cutset_inner_inf,
                    lower_bound_terms, waterfill)
from .sweep import SweepConfig, SweepResult, emit, run_sweep

__all__ = [
    "BoundResult", "CovarianceProfile", "MCEstimate", "NumericalDomainError",
    "OptimizerConfig", "RateBreakdown", "RelayChannel", "SweepConfig",
    "SweepResult", "Topology", "UpperBoundVars", "achievable_rate",
    "angle_between", "cutset_broadcast_term", "cutset_inner_inf",
    "decode_profile", "emit", "estimate_mi", "grid_search_scalar",
    "log_det_plus_identity", "lower_bound_terms", "make_angle_channel",
    "maximize", "optimize_lower_bound", "optimize_strategy",
    "optimize_upper_bound", "project_psd_trace", "run_sweep",
    "schur_conditional_cov", "waterfill",
]

__version__ = "0.1.0"
