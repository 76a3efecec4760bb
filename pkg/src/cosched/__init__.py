"""Co-scheduling, resource partitioning, and power capping for CPU-GPU nodes.

The package predicts per-job slowdowns under co-location, partitioning, and
power capping with a small feedforward network, searches hardware
configurations exhaustively per job pair, and pairs up a queue of jobs via
minimum-weight perfect matching.  A synthetic analytic oracle stands in for
real hardware so the whole pipeline can be trained, exercised, and verified
at desk scale.
"""

__version__ = "0.1.0"

from .core import (
    ConfigSpace,
    HardwareConfig,
    JobProfile,
    JobSet,
    Schedule,
    SchedulingParams,
    ValidationError,
    default_space,
    enumerate_corun_configs,
    enumerate_solo_splits,
    normalize_input,
    solo_config,
)
from .fnn import (
    LabeledSample,
    NetworkWeights,
    TrainingConfig,
    TrainingDivergedError,
    backward,
    forward,
    initialize_weights,
    load_weights,
    save_weights,
    train,
)
from .estimator import (
    FnnSlowdownModel,
    SlowdownQuery,
    corun_app_time,
    corun_time,
    slowdown,
    solo_app_time,
    solorun_time,
)
from .hwopt import PairDecision, decide_pair, optimize_corun, optimize_solo_pair
from .matcher import (
    PairGraph,
    brute_force_matching,
    matching_weight,
    min_weight_perfect_matching,
)
from .scheduler import SchedulerInput, build_graph, predicted_makespan, schedule
from .simenv import (
    OracleParams,
    OracleSlowdownModel,
    SyntheticJobSpec,
    generate_dataset,
    generate_workload,
    oracle_slowdown,
    run_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
