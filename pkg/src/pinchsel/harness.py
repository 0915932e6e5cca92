"""Seeded Monte Carlo driver for rate-vs-array-size and convergence runs.

Per-trial seeds are derived by mixing (master seed, antenna count, trial
index) through splitmix64, so a trial's user placement never depends on which
solvers are requested or on the order the antenna counts are swept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .baselines import (
    BRUTE_FORCE_CAP,
    SolverResult,
    best_singleton,
    brute_force_select,
    greedy_pgga_select,
)
from .channel import build_channel_matrix, sample_users
from .config import SystemConfig
from .metric import rate_from_metric
from .vss import vss_select

SOLVER_NAMES = ("vss", "brute_force", "pgga", "best_singleton")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, n_antennas: int, trial_index: int) -> int:
    """Stable per-(N, trial) child seed, independent of sweep ordering."""
    s = _splitmix64(master_seed & _MASK64)
    s = _splitmix64(s ^ (n_antennas & _MASK64))
    return _splitmix64(s ^ (trial_index & _MASK64))


@dataclass(frozen=True)
class ExperimentSpec:
    base_config: SystemConfig
    n_values: tuple[int, ...]
    solvers: tuple[str, ...]
    n_trials: int
    seed: int
    brute_force_cap: int = BRUTE_FORCE_CAP

    def __post_init__(self) -> None:
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if not self.n_values:
            raise ValueError("n_values must be non-empty")
        if any(n < 1 for n in self.n_values):
            raise ValueError(f"antenna counts must be >= 1, got {self.n_values}")
        unknown = [s for s in self.solvers if s not in SOLVER_NAMES]
        if unknown:
            raise ValueError(f"unknown solvers {unknown}; choose from {SOLVER_NAMES}")
        if not self.solvers:
            raise ValueError("at least one solver is required")
        if "brute_force" in self.solvers:
            over = [n for n in self.n_values if n > self.brute_force_cap]
            if over:
                raise ValueError(
                    f"brute force requested for N={over} beyond cap {self.brute_force_cap}"
                )
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "solvers", tuple(self.solvers))


@dataclass(frozen=True)
class SolverTrial:
    """One solver's outcome on one channel instance."""

    solver: str
    min_rate: float
    metric: float
    active_count: int
    evaluations: int
    termination_stage: int | None = None
    best_stage: int | None = None
    running_best: tuple[float, ...] | None = None  # metric units, per stage


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    n_antennas: int
    seed: int
    results: dict[str, SolverTrial] = field(default_factory=dict)


def run_trial(
    config: SystemConfig,
    seed: int,
    solvers: tuple[str, ...],
    trial_index: int = 0,
    brute_force_cap: int = BRUTE_FORCE_CAP,
) -> TrialRecord:
    """Sample one placement, build the channel once, run every solver on it."""
    users = sample_users(seed, config)
    B = build_channel_matrix(config, users)
    n_bins = config.phase_bins
    results: dict[str, SolverTrial] = {}

    for solver in solvers:
        if solver == "vss":
            res = vss_select(B, n_bins)
            bound = (n_bins**config.n_users) * config.n_antennas**2
            if res.trace.metric_evaluations > bound:
                raise AssertionError(
                    f"trellis evaluations {res.trace.metric_evaluations} exceed "
                    f"the Q^M N^2 bound {bound}"
                )
            results[solver] = SolverTrial(
                solver=solver,
                min_rate=rate_from_metric(config, res.best_metric),
                metric=res.best_metric,
                active_count=res.best_activation.active_count,
                evaluations=res.trace.metric_evaluations,
                termination_stage=res.trace.termination_stage,
                best_stage=res.trace.best_stage,
                running_best=res.trace.running_best,
            )
        else:
            if solver == "brute_force":
                sres: SolverResult = brute_force_select(B, max_antennas=brute_force_cap)
            elif solver == "pgga":
                sres = greedy_pgga_select(B)
            elif solver == "best_singleton":
                sres = best_singleton(B)
            else:
                raise ValueError(f"unknown solver {solver!r}")
            results[solver] = SolverTrial(
                solver=solver,
                min_rate=rate_from_metric(config, sres.metric),
                metric=sres.metric,
                active_count=sres.activation.active_count,
                evaluations=sres.evaluations,
            )

    _check_ordering(results)
    return TrialRecord(
        trial_index=trial_index, n_antennas=config.n_antennas, seed=seed, results=results
    )


def _check_ordering(results: dict[str, SolverTrial]) -> None:
    brute = results.get("brute_force")
    vss = results.get("vss")
    single = results.get("best_singleton")
    if brute and vss and vss.metric > brute.metric:
        raise AssertionError(
            f"trellis metric {vss.metric} exceeds exhaustive optimum {brute.metric}"
        )
    if brute and single and single.metric > brute.metric:
        raise AssertionError("singleton metric exceeds exhaustive optimum")
    if vss and single and single.metric > vss.metric:
        raise AssertionError(
            f"singleton metric {single.metric} exceeds trellis metric {vss.metric}"
        )


@dataclass(frozen=True)
class SolverAggregate:
    n_antennas: int
    solver: str
    mean_min_rate: float
    mean_metric: float
    mean_evaluations: float
    mean_active_count: float
    mean_termination_stage: float | None = None
    stage_rates: tuple[float, ...] | None = None


@dataclass(frozen=True)
class AggregateResult:
    spec: ExperimentSpec
    entries: tuple[SolverAggregate, ...]

    def get(self, n_antennas: int, solver: str) -> SolverAggregate:
        for e in self.entries:
            if e.n_antennas == n_antennas and e.solver == solver:
                return e
        raise KeyError(f"no aggregate for N={n_antennas}, solver={solver}")


def mean_stage_curve(curves: list[tuple[float, ...]]) -> tuple[float, ...]:
    """Average running-best traces, carrying each final value forward so all
    trials align on the longest termination stage."""
    if not curves:
        return ()
    depth = max(len(c) for c in curves)
    padded = [c + (c[-1],) * (depth - len(c)) for c in curves]
    return tuple(
        sum(c[s] for c in padded) / len(padded) for s in range(depth)
    )


def run_sweep(spec: ExperimentSpec) -> AggregateResult:
    """Run ``n_trials`` trials per antenna count and aggregate per solver."""
    entries: list[SolverAggregate] = []
    for n in spec.n_values:
        config = spec.base_config.with_antennas(n)
        records = [
            run_trial(
                config,
                derive_seed(spec.seed, n, t),
                spec.solvers,
                trial_index=t,
                brute_force_cap=spec.brute_force_cap,
            )
            for t in range(spec.n_trials)
        ]
        for solver in spec.solvers:
            trials = [r.results[solver] for r in records]
            k = len(trials)
            term = None
            curve = None
            if solver == "vss":
                term = sum(t.termination_stage for t in trials) / k
                # stage curve: mean running-best metric per stage, converted
                # to a rate (the curve the convergence plots report)
                mean_metrics = mean_stage_curve([t.running_best for t in trials])
                curve = tuple(rate_from_metric(config, m) for m in mean_metrics)
            entries.append(
                SolverAggregate(
                    n_antennas=n,
                    solver=solver,
                    mean_min_rate=sum(t.min_rate for t in trials) / k,
                    mean_metric=sum(t.metric for t in trials) / k,
                    mean_evaluations=sum(t.evaluations for t in trials) / k,
                    mean_active_count=sum(t.active_count for t in trials) / k,
                    mean_termination_stage=term,
                    stage_rates=curve,
                )
            )
    return AggregateResult(spec=spec, entries=tuple(entries))


def run_convergence(
    config: SystemConfig, n_trials: int, seed: int
) -> tuple[float, ...]:
    """Mean running-best rate per trellis stage over seeded trials."""
    spec = ExperimentSpec(
        base_config=config,
        n_values=(config.n_antennas,),
        solvers=("vss",),
        n_trials=n_trials,
        seed=seed,
    )
    agg = run_sweep(spec)
    return agg.get(config.n_antennas, "vss").stage_rates
