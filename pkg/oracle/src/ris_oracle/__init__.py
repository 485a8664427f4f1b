"""Independent validation of exported solver instances."""

from .convex import check_covariance_instance, solve_fixed_phase
from .gridsearch import check_phase_instance, grid_search_phase, objective_bits
from .instances import OracleInstance, find_instances, load_instance

__all__ = [
    "check_covariance_instance", "solve_fixed_phase",
    "check_phase_instance", "grid_search_phase", "objective_bits",
    "OracleInstance", "find_instances", "load_instance",
]
