"""DC optimal power flow load-shedding evaluator."""

from .lp import LinearProgram, LpError, LpSolution, LpStatus, dual_bound, solve_lp
from .network import Bus, Generator, Line, NetworkModel, apply_state
from .shed import DcopfEvaluator, build_shed_lp, min_load_shed

__all__ = [
    "Bus",
    "DcopfEvaluator",
    "Generator",
    "Line",
    "LinearProgram",
    "LpError",
    "LpSolution",
    "LpStatus",
    "NetworkModel",
    "apply_state",
    "build_shed_lp",
    "dual_bound",
    "min_load_shed",
    "solve_lp",
]
