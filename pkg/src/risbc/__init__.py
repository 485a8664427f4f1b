"""Sum-rate maximization for a reflecting-surface-aided MIMO broadcast
channel, with a Monte Carlo simulation harness."""

from .ao import AoOptions, AoReport, alternating_optimize, complexity_estimate
from .channel import (ChannelSet, RisPhases, compose_all,
                      compose_effective_channel, sample_channels)
from .covariance import (CovarianceSet, DualState, dual_bisection,
                         dual_mac_sum_rate, interference_matrix,
                         inner_cyclic_maximize, waterfill_update)
from .errors import (ConvergenceError, DegenerateGeometryError,
                     NonPsdMatrixError, ScenarioRunError)
from .estimators import DualMacCovarianceSolver, RisSumRateOptimizer
from .geometry import (SystemGeometry, UserPlacement, geometry_distances,
                       path_loss_direct, path_loss_ris)
from .harness import (RunRecord, ScenarioConfig, run_scenario,
                      sample_user_positions, solve_realization)
from .phases import (PhaseSubproblem, build_subproblem, optimal_phase,
                     sweep_all_phases)

__version__ = "0.1.0"

__all__ = [
    "AoOptions", "AoReport", "alternating_optimize", "complexity_estimate",
    "ChannelSet", "RisPhases", "compose_all", "compose_effective_channel",
    "sample_channels", "CovarianceSet", "DualState", "dual_bisection",
    "dual_mac_sum_rate", "interference_matrix", "inner_cyclic_maximize",
    "waterfill_update", "ConvergenceError", "DegenerateGeometryError",
    "NonPsdMatrixError", "ScenarioRunError", "DualMacCovarianceSolver",
    "RisSumRateOptimizer", "SystemGeometry", "UserPlacement",
    "geometry_distances", "path_loss_direct", "path_loss_ris", "RunRecord",
    "ScenarioConfig", "run_scenario", "sample_user_positions",
    "solve_realization", "PhaseSubproblem", "build_subproblem",
    "optimal_phase", "sweep_all_phases",
]
