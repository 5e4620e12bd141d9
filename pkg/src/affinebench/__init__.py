"""Affine combinations of BBOB-style test functions, an optimizer portfolio,
and fixed-target benchmarking metrics."""

__version__ = "0.1.0"

from .combine import CombinedProblem, NonFiniteValueError, combine
from .metrics import (
    AUCTable,
    ECDFCurve,
    RankEntry,
    TargetGrid,
    ecdf_auc,
    ecdf_curve,
    ert,
    geomean_trajectory,
    hitting_times,
    rank_algorithms,
    target_grid,
)
from .optim import AlgorithmConfig, RunTrace, run_algorithm
from .rng import DegenerateStreamError, Stream, instance_stream, mix64
from .runner import (
    ConfigError,
    ExperimentConfig,
    TraceSet,
    derive_seed,
    load_config,
    run_experiment,
)
from .suite import (
    MANDATORY_FUNCTIONS,
    PlacementPolicy,
    ProblemId,
    ProblemInstance,
    UnsupportedFunctionError,
    make_problem,
)

__all__ = [
    "__version__",
    "AlgorithmConfig",
    "AUCTable",
    "CombinedProblem",
    "ConfigError",
    "DegenerateStreamError",
    "ECDFCurve",
    "ExperimentConfig",
    "MANDATORY_FUNCTIONS",
    "NonFiniteValueError",
    "PlacementPolicy",
    "ProblemId",
    "ProblemInstance",
    "RankEntry",
    "RunTrace",
    "Stream",
    "TargetGrid",
    "TraceSet",
    "UnsupportedFunctionError",
    "combine",
    "derive_seed",
    "ecdf_auc",
    "ecdf_curve",
    "ert",
    "geomean_trajectory",
    "hitting_times",
    "instance_stream",
    "load_config",
    "make_problem",
    "mix64",
    "rank_algorithms",
    "run_algorithm",
    "run_experiment",
    "target_grid",
]
