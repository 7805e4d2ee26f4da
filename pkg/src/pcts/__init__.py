"""Tree search for black-box maximization under delayed, noisy, multi-fidelity feedback."""

from .benchmarks import Benchmark, benchmark_names, get_benchmark, register
from .engine import (
    RoundRecord,
    RunConfig,
    RunTrace,
    recommend,
    run_pcts,
    run_random_search,
    run_wait_and_act,
)
from .harness import (
    ConfigError,
    CurvePoint,
    ExperimentSpec,
    SuiteResult,
    SummaryRow,
    emit_summary_csv,
    emit_trace_csv,
    parse_config,
    run_suite,
)
from .mfpoo import MfpooPlan, plan_instances, run_mfpoo
from .partition import Box, NodeStats, PartitionNode, PartitionTree
from .policies import (
    PolicyKind,
    PolicyParams,
    apply_fidelity_bias,
    confidence_bound,
    empirical_mean,
    empirical_variance,
)
from .simulator import (
    CostModel,
    DelayModel,
    FidelityModel,
    QueryRecord,
    SimEnvironment,
    fidelity_for_depth,
    horizon_exact,
    horizon_lower_bound,
    sample_delay,
)

__version__ = "0.1.0"

__all__ = [
    "Benchmark",
    "Box",
    "ConfigError",
    "CostModel",
    "CurvePoint",
    "DelayModel",
    "ExperimentSpec",
    "FidelityModel",
    "MfpooPlan",
    "NodeStats",
    "PartitionNode",
    "PartitionTree",
    "PolicyKind",
    "PolicyParams",
    "QueryRecord",
    "RoundRecord",
    "RunConfig",
    "RunTrace",
    "SimEnvironment",
    "SuiteResult",
    "SummaryRow",
    "apply_fidelity_bias",
    "benchmark_names",
    "confidence_bound",
    "emit_summary_csv",
    "emit_trace_csv",
    "empirical_mean",
    "empirical_variance",
    "fidelity_for_depth",
    "get_benchmark",
    "horizon_exact",
    "horizon_lower_bound",
    "parse_config",
    "plan_instances",
    "recommend",
    "register",
    "run_mfpoo",
    "run_pcts",
    "run_random_search",
    "run_suite",
    "run_wait_and_act",
    "sample_delay",
]
