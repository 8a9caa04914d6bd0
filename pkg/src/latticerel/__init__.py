"""Power-system reliability assessment by lattice partition of the state space.

The main entry points are :func:`latticerel.csilp.run` (critical states
and LOLP bounds), the baselines in :mod:`latticerel.baselines` and the
command-line driver :mod:`latticerel.cli`.
"""

from .csilp import Bounds, Criteria, CriticalRecord, CsilpResult, Ledger, run
from .evaluator import (
    BaseStateFailure,
    CachedEvaluator,
    CriticalSet,
    CutsetOracle,
    EvaluationOutcome,
    Evaluator,
    EvaluatorError,
    Status,
    ThresholdOracle,
    cutset_oracle,
    threshold_oracle,
)
from .partition import ColumnOrder, PartitionResult, choose_order, partition_by_level1, partition_by_level2
from .state import ComponentReliability, Lattice, SystemState, lattice_probability, state_probability
from .system import System, SystemFileError, load_system

__version__ = "0.1.0"

__all__ = [
    "BaseStateFailure",
    "Bounds",
    "CachedEvaluator",
    "ColumnOrder",
    "ComponentReliability",
    "Criteria",
    "CriticalRecord",
    "CriticalSet",
    "CsilpResult",
    "CutsetOracle",
    "EvaluationOutcome",
    "Evaluator",
    "EvaluatorError",
    "Lattice",
    "Ledger",
    "PartitionResult",
    "Status",
    "System",
    "SystemFileError",
    "SystemState",
    "ThresholdOracle",
    "choose_order",
    "cutset_oracle",
    "lattice_probability",
    "load_system",
    "partition_by_level1",
    "partition_by_level2",
    "run",
    "state_probability",
    "threshold_oracle",
]
