"""Antenna-subset activation for waveguide-fed pinching-antenna arrays.

Builds effective channels for uniformly pinched waveguides, evaluates the
worst-user activation objective, and solves the subset-selection problem with
a phase-quantised trellis search, an exhaustive oracle and a greedy baseline,
plus a seeded Monte Carlo harness and a CLI for experiment reproduction.
"""

from .baselines import SolverResult, best_singleton, brute_force_select, greedy_pgga_select
from .channel import (
    ChannelMatrix,
    Point3,
    UserPlacement,
    build_channel_matrix,
    free_space_gain,
    pa_positions,
    sample_users,
    waveguide_phase,
)
from .config import SystemConfig, dbm_to_watts, watts_to_dbm
from .harness import (
    AggregateResult,
    ExperimentSpec,
    TrialRecord,
    derive_seed,
    run_convergence,
    run_sweep,
    run_trial,
)
from .metric import (
    ActivationVector,
    MetricReport,
    accumulated_signal,
    maxmin_metric,
    rate_from_metric,
    rate_report,
)
from .vss import (
    Survivor,
    TrellisStateId,
    VssResult,
    VssTrace,
    quantize_phase,
    stage_expand,
    state_of,
    vss_select,
)

__all__ = [
    "ActivationVector",
    "AggregateResult",
    "ChannelMatrix",
    "ExperimentSpec",
    "MetricReport",
    "Point3",
    "SolverResult",
    "Survivor",
    "SystemConfig",
    "TrellisStateId",
    "TrialRecord",
    "UserPlacement",
    "VssResult",
    "VssTrace",
    "accumulated_signal",
    "best_singleton",
    "brute_force_select",
    "build_channel_matrix",
    "dbm_to_watts",
    "derive_seed",
    "free_space_gain",
    "greedy_pgga_select",
    "maxmin_metric",
    "pa_positions",
    "quantize_phase",
    "rate_from_metric",
    "rate_report",
    "run_convergence",
    "run_sweep",
    "run_trial",
    "sample_users",
    "stage_expand",
    "state_of",
    "vss_select",
    "waveguide_phase",
    "watts_to_dbm",
]
