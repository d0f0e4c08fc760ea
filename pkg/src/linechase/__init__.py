"""Online line chasing: policies, offline optimum, adversaries and checks."""

from .core import Instance, OnlineRun, Path, competitive_ratio, random_instance, ratio, run_policy
from .errors import ContractViolation, DegenerateInput, InvalidInput
from .geometry import DirectSimilarity, Line
from .offline import OptResult, SolverConfig, solve_offline
from .policies import BetaPolicy, drift, extended_drift, get_policy, greedy

__all__ = [
    "BetaPolicy", "ContractViolation", "DegenerateInput", "DirectSimilarity", "Instance",
    "InvalidInput", "Line", "OnlineRun", "OptResult", "Path", "SolverConfig",
    "competitive_ratio", "drift", "extended_drift", "get_policy", "greedy",
    "random_instance", "ratio", "run_policy", "solve_offline",
]
