"""Seeded experiment protocols: trials, sweeps, saturation runs, comparisons.

Every batch is a pure function of its spec: the trial seed determines the
obstacle arrangement and the planner stream, and each trial's seed is
recorded so any point on any curve can be recomputed on its own. Wall-clock
leg times are the one physical measurement; batches accept a recorded timing
ledger so a replay can re-emit a bundle byte-for-byte.

Failures inside a trial (planner failures, saturated arrangements) are
recorded on the trial, never aborting the batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .environment import (
    ArrangementSpec,
    Environment,
    Workspace,
    periodic_arrangement,
    random_arrangement,
)
from .metrics import LegMetrics, MetricsReport, assess, mean_metrics
from .pgf import PartialFailure, PgfOutcome, StructureSpec, Toolpath, generate_toolpath
from .planners import PlannerConfig, PlannerKind
from .seeding import derive_seed

SWEEP_PARAMETERS = (
    "num_obstacles",
    "grid_size",
    "expansion_length",
    "num_neighbors",
    "max_edge_length",
)

_PARAM_KINDS = {
    "num_obstacles": None,  # applies to every planner
    "grid_size": (PlannerKind.DIJKSTRA, PlannerKind.ASTAR),
    "expansion_length": (PlannerKind.RRT,),
    "num_neighbors": (PlannerKind.PRM,),
    "max_edge_length": (PlannerKind.PRM,),
}

DEFAULT_TRIALS = 20

TimingLedger = Dict[str, List[float]]


@dataclass(frozen=True)
class TrialSpec:
    """Everything one toolpath-generation run depends on."""

    structure: StructureSpec
    arrangement: Optional[ArrangementSpec]
    planner_cfg: PlannerConfig
    trial_seed: int
    workspace: Workspace = Workspace()
    clearance: float = 10.0
    deviation_sample: str = "midpoint"


@dataclass
class TrialResult:
    spec: TrialSpec
    outcome: Optional[PgfOutcome]
    report: Optional[MetricsReport]
    error: Optional[str]

    @property
    def success(self) -> bool:
        return isinstance(self.outcome, Toolpath)

    @property
    def outcome_label(self) -> str:
        if self.error is not None:
            return f"error:{self.error}"
        if isinstance(self.outcome, PartialFailure):
            return f"failure:{self.outcome.reason.value}"
        return "success"

    @property
    def leg_elapsed(self) -> Tuple[float, ...]:
        """Wall-clock seconds of the legs this trial emitted, in leg order."""
        if isinstance(self.outcome, Toolpath):
            return tuple(p.elapsed for _, p in self.outcome.legs)
        if isinstance(self.outcome, PartialFailure):
            return tuple(p.elapsed for _, p in self.outcome.completed)
        return ()

    @property
    def total_run_time(self) -> Optional[float]:
        if isinstance(self.outcome, Toolpath):
            return self.outcome.total_elapsed
        return None


@dataclass
class TrialRecord:
    key: str
    seed: int
    result: TrialResult


def build_environment(spec: TrialSpec) -> Environment:
    """Build the trial's environment; placement randomness derives from the
    trial seed, with the structure vertices kept out of collision range."""
    if spec.arrangement is None:
        obstacles: Sequence = ()
    elif spec.arrangement.kind == "periodic":
        obstacles = periodic_arrangement(spec.arrangement, spec.workspace)
    else:
        arr = replace(spec.arrangement, seed=derive_seed(spec.trial_seed, 0))
        obstacles = random_arrangement(
            arr, spec.workspace, keepout=spec.structure.vertices, clearance=spec.clearance
        )
    return Environment(spec.workspace, tuple(obstacles), spec.clearance)


def _override_elapsed(outcome: PgfOutcome, elapsed: Sequence[float]) -> PgfOutcome:
    legs = outcome.legs if isinstance(outcome, Toolpath) else outcome.completed
    if len(elapsed) != len(legs):
        raise ValueError("timing override does not match the emitted leg count")
    patched = tuple(
        (k, replace(path, elapsed=float(t))) for (k, path), t in zip(legs, elapsed)
    )
    if isinstance(outcome, Toolpath):
        return replace(outcome, legs=patched)
    return replace(outcome, completed=patched)


def run_trial(
    spec: TrialSpec, *, leg_elapsed_override: Optional[Sequence[float]] = None
) -> TrialResult:
    """Run one seeded trial: build the environment, plan, score.

    Any exception is captured on the result so batches keep going.
    """
    try:
        spec.structure.validate_in(spec.workspace)
        env = build_environment(spec)
        cfg = replace(spec.planner_cfg, seed=derive_seed(spec.trial_seed, 1))
        outcome = generate_toolpath(spec.structure, env, cfg)
    except Exception as exc:  # recorded, never propagated out of a batch
        return TrialResult(spec, None, None, f"{type(exc).__name__}: {exc}")
    if leg_elapsed_override is not None:
        outcome = _override_elapsed(outcome, leg_elapsed_override)
    report = assess(outcome, spec.deviation_sample) if isinstance(outcome, Toolpath) else None
    return TrialResult(spec, outcome, report, None)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[float, ...]
    base: TrialSpec
    trials_per_value: int = DEFAULT_TRIALS

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if diffs and not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("sweep values must be strictly monotone")
        if self.trials_per_value < 1:
            raise ValueError("trials_per_value must be >= 1")
        kinds = _PARAM_KINDS[self.parameter]
        if kinds is not None and self.base.planner_cfg.kind not in kinds:
            raise ValueError(
                f"parameter {self.parameter!r} does not apply to "
                f"{self.base.planner_cfg.kind.value}"
            )
        if self.parameter == "num_obstacles" and self.base.arrangement is None:
            raise ValueError("num_obstacles sweep needs an obstacle arrangement")


def spec_with_value(base: TrialSpec, parameter: str, value: float) -> TrialSpec:
    if parameter == "num_obstacles":
        return replace(base, arrangement=replace(base.arrangement, count=int(value)))
    if parameter in ("num_neighbors",):
        return replace(base, planner_cfg=replace(base.planner_cfg, num_neighbors=int(value)))
    return replace(base, planner_cfg=replace(base.planner_cfg, **{parameter: float(value)}))


@dataclass
class SweepPoint:
    value: float
    records: List[TrialRecord]
    success_rate: float
    mean_total_run_time: Optional[float]
    mean_metrics: Optional[LegMetrics]


@dataclass
class SweepResult:
    spec: SweepSpec
    points: List[SweepPoint]
    timings: TimingLedger


def _aggregate(records: List[TrialRecord]) -> Tuple[float, Optional[float], Optional[LegMetrics]]:
    successes = [r for r in records if r.result.success]
    rate = len(successes) / len(records)
    if not successes:
        return rate, None, None
    mean_total = sum(r.result.total_run_time for r in successes) / len(successes)
    metrics = mean_metrics(r.result.report.aggregate_mean for r in successes)
    return rate, mean_total, metrics


def sweep(s: SweepSpec, *, timings: Optional[TimingLedger] = None) -> SweepResult:
    """Run trials_per_value seeded trials at each parameter value."""
    recorded: TimingLedger = {}
    points: List[SweepPoint] = []
    for vi, value in enumerate(s.values):
        records: List[TrialRecord] = []
        for ti in range(s.trials_per_value):
            seed = derive_seed(s.base.trial_seed, vi, ti)
            tspec = replace(spec_with_value(s.base, s.parameter, value), trial_seed=seed)
            key = f"{vi}:{ti}"
            override = timings.get(key) if timings is not None else None
            result = run_trial(tspec, leg_elapsed_override=override)
            recorded[key] = list(result.leg_elapsed)
            records.append(TrialRecord(key, seed, result))
        rate, mean_total, metrics = _aggregate(records)
        points.append(SweepPoint(value, records, rate, mean_total, metrics))
    return SweepResult(s, points, recorded)


@dataclass
class SaturationResult:
    densities: List[int]
    rates: Dict[str, List[float]]  # planner kind value -> success rate per density
    records: List[TrialRecord]
    saturation_density: Optional[int]
    ladder_exhausted: bool
    timings: TimingLedger


def saturate(
    structure: StructureSpec,
    arrangement_kind: str,
    planner_cfgs: Sequence[PlannerConfig],
    ladder: Sequence[int],
    trials: int = DEFAULT_TRIALS,
    *,
    batch_seed: int = 0,
    workspace: Workspace = Workspace(),
    clearance: float = 10.0,
    margin: float = 50.0,
    deviation_sample: str = "midpoint",
    timings: Optional[TimingLedger] = None,
) -> SaturationResult:
    """Climb the density ladder until no planner succeeds in any trial.

    The saturation density is the highest tested density at which at least
    one planner found a feasible toolpath in at least one trial. Trial seeds
    are shared across planners at each (density, trial) cell so planners face
    identical environments.
    """
    if not planner_cfgs:
        raise ValueError("saturate needs at least one planner")
    recorded: TimingLedger = {}
    densities: List[int] = []
    rates: Dict[str, List[float]] = {cfg.kind.value: [] for cfg in planner_cfgs}
    records: List[TrialRecord] = []
    saturation_density: Optional[int] = None
    ladder_exhausted = True
    for di, density in enumerate(ladder):
        densities.append(int(density))
        arrangement = ArrangementSpec(arrangement_kind, int(density), margin=margin)
        any_success = False
        for cfg in planner_cfgs:
            successes = 0
            for ti in range(trials):
                seed = derive_seed(batch_seed, di, ti)
                tspec = TrialSpec(
                    structure, arrangement, cfg, seed, workspace, clearance, deviation_sample
                )
                key = f"{di}:{cfg.kind.value}:{ti}"
                override = timings.get(key) if timings is not None else None
                result = run_trial(tspec, leg_elapsed_override=override)
                recorded[key] = list(result.leg_elapsed)
                records.append(TrialRecord(key, seed, result))
                if result.success:
                    successes += 1
            rates[cfg.kind.value].append(successes / trials)
            if successes:
                any_success = True
        if any_success:
            saturation_density = int(density)
        else:
            ladder_exhausted = False
            break
    return SaturationResult(
        densities, rates, records, saturation_density, ladder_exhausted, recorded
    )


def find_half_success_density(
    planner_cfg: PlannerConfig,
    structure: StructureSpec,
    ladder: Sequence[int],
    *,
    trials: int = DEFAULT_TRIALS,
    batch_seed: int = 0,
    arrangement_kind: str = "random",
    workspace: Workspace = Workspace(),
    clearance: float = 10.0,
    margin: float = 50.0,
) -> int:
    """Smallest ladder density where the measured success rate drops to <= 50%."""
    for di, density in enumerate(ladder):
        arrangement = ArrangementSpec(arrangement_kind, int(density), margin=margin)
        successes = 0
        for ti in range(trials):
            seed = derive_seed(batch_seed, di, ti)
            tspec = TrialSpec(structure, arrangement, planner_cfg, seed, workspace, clearance)
            if run_trial(tspec).success:
                successes += 1
        if successes / trials <= 0.5:
            return int(density)
    raise RuntimeError("ladder exhausted")


@dataclass
class ComparisonRow:
    kind: PlannerKind
    trials: int
    success_rate: float
    mean_metrics: Optional[LegMetrics]
    mean_total_run_time: Optional[float]
    records: List[TrialRecord]


@dataclass
class ComparisonResult:
    density: int
    rows: List[ComparisonRow]
    timings: TimingLedger


def compare(
    structure: StructureSpec,
    arrangement: ArrangementSpec,
    planner_cfgs: Sequence[PlannerConfig],
    trials: int = DEFAULT_TRIALS,
    *,
    batch_seed: int = 0,
    workspace: Workspace = Workspace(),
    clearance: float = 10.0,
    deviation_sample: str = "midpoint",
    timings: Optional[TimingLedger] = None,
) -> ComparisonResult:
    """Success rate and mean metrics per planner at one obstacle density.

    Trial seeds are shared across planners, so row k of every planner ran
    against the same environment.
    """
    recorded: TimingLedger = {}
    rows: List[ComparisonRow] = []
    for cfg in planner_cfgs:
        records: List[TrialRecord] = []
        for ti in range(trials):
            seed = derive_seed(batch_seed, ti)
            tspec = TrialSpec(
                structure, arrangement, cfg, seed, workspace, clearance, deviation_sample
            )
            key = f"{cfg.kind.value}:{ti}"
            override = timings.get(key) if timings is not None else None
            result = run_trial(tspec, leg_elapsed_override=override)
            recorded[key] = list(result.leg_elapsed)
            records.append(TrialRecord(key, seed, result))
        rate, mean_total, metrics = _aggregate(records)
        rows.append(ComparisonRow(cfg.kind, trials, rate, metrics, mean_total, records))
    return ComparisonResult(arrangement.count, rows, recorded)
