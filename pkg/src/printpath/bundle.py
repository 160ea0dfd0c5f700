"""Result bundle emission: manifests, CSV tables, toolpath JSON, figures.

A bundle directory is fully described by its manifest.json: the resolved
config echo, the RNG algorithm, the per-trial seed ledger, and the recorded
wall-clock leg timings. Re-running the same command from the manifest
recomputes every waypoint and aggregate from the recorded seeds and re-emits
the recorded timings, so a replayed bundle is byte-identical to the
original. Floats are serialized with repr so CSV and JSON cells round-trip
exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import replace
from pathlib import Path as FsPath
from typing import Any, Dict, List, Optional, Sequence

from .config import TOOL_NAME, TOOL_VERSION, ConfigError, RunConfig, run_config_from_echo
from .experiments import (
    ComparisonResult,
    SaturationResult,
    SweepResult,
    SweepSpec,
    TimingLedger,
    TrialResult,
    TrialSpec,
    build_environment,
    compare,
    run_trial,
    saturate,
    sweep,
)
from .figures import save_bars_png, save_curves_png, save_scene_png
from .geometry import Point2
from .metrics import LegMetrics
from .pgf import PartialFailure, StructureSpec, Toolpath
from .planners import Path as PlannedPath
from .planners import PlannerKind
from .seeding import RNG_ALGORITHM
from .svgplot import bars_svg, curves_svg, scene_svg

METRIC_COLUMNS = ("roughness_deg", "num_turns", "offset_mm", "rmse_mm", "path_deviation")

COMPARISON_COLUMNS = (
    "planner",
    "structure",
    "arrangement",
    "density",
    "trials",
    "success_rate",
    "roughness_deg",
    "num_turns",
    "offset_mm",
    "rmse_mm",
    "path_deviation",
    "mean_run_time_s",
    "total_run_time_s",
)


def _cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def _metric_cells(m: Optional[LegMetrics]) -> List[str]:
    if m is None:
        return [""] * len(METRIC_COLUMNS)
    return [repr(m.roughness), repr(m.num_turns), repr(m.offset), repr(m.rmse), repr(m.path_deviation)]


def _write_json(path: FsPath, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_csv(path: FsPath, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _manifest(
    command: str,
    rc: RunConfig,
    ledger: List[Dict[str, Any]],
    timings: TimingLedger,
    result: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "tool": {"name": TOOL_NAME, "version": TOOL_VERSION},
        "command": command,
        "rng_algorithm": RNG_ALGORITHM,
        "config": rc.echo(),
        "config_digest": rc.digest(),
        "ledger": ledger,
        "timings": timings,
    }
    if result is not None:
        payload["result"] = result
    return payload


def toolpath_payload(toolpath: Toolpath, structure_name: str, digest: str) -> Dict[str, Any]:
    return {
        "structure": {
            "name": structure_name,
            "vertices": [[v.x, v.y] for v in toolpath.structure.vertices],
            "closed": toolpath.structure.closed,
        },
        "planner": toolpath.legs[0][1].planner.value if toolpath.legs else None,
        "legs": [
            {
                "pair": pair,
                "waypoints": [[p.x, p.y] for p in path.waypoints],
                "elapsed_s": path.elapsed,
            }
            for pair, path in toolpath.legs
        ],
        "config_digest": digest,
    }


def load_toolpath(path: FsPath) -> Toolpath:
    data = json.loads(FsPath(path).read_text())
    structure = StructureSpec(
        tuple(Point2(float(x), float(y)) for x, y in data["structure"]["vertices"]),
        bool(data["structure"]["closed"]),
    )
    kind = PlannerKind(data["planner"])
    legs = tuple(
        (
            int(leg["pair"]),
            PlannedPath(
                waypoints=tuple(Point2(float(x), float(y)) for x, y in leg["waypoints"]),
                planner=kind,
                elapsed=float(leg["elapsed_s"]),
            ),
        )
        for leg in data["legs"]
    )
    return Toolpath(structure, legs)


def _legs_of(result: TrialResult) -> List[Sequence[Point2]]:
    if isinstance(result.outcome, Toolpath):
        return [path.waypoints for _, path in result.outcome.legs]
    if isinstance(result.outcome, PartialFailure):
        return [path.waypoints for _, path in result.outcome.completed]
    return []


def write_plan_bundle(outdir: FsPath, rc: RunConfig, result: TrialResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    ledger = [
        {
            "key": "plan",
            "seed": rc.seed,
            "outcome": result.outcome_label,
            "legs_emitted": len(result.leg_elapsed),
        }
    ]
    timings: TimingLedger = {"plan": list(result.leg_elapsed)}
    manifest = _manifest("plan", rc, ledger, timings)
    _write_json(outdir / "manifest.json", manifest)

    if result.error is not None:
        _write_json(outdir / "outcome.json", {"outcome": result.outcome_label})
        return

    env = build_environment(_plan_trial_spec(rc))
    legs = _legs_of(result)
    title = f"{rc.structure_name} / {rc.planner.kind.value}"
    (outdir / "scene.svg").write_text(scene_svg(env, rc.structure, legs, title=title))
    save_scene_png(outdir / "scene.png", env, rc.structure, legs, title=title)

    if isinstance(result.outcome, Toolpath):
        _write_json(
            outdir / "toolpath.json",
            toolpath_payload(result.outcome, rc.structure_name, rc.digest()),
        )
        report = result.report
        rows = []
        for (pair, _), m in zip(result.outcome.legs, report.per_leg):
            rows.append(
                [str(pair)] + _metric_cells(m) + [repr(m.run_time)]
            )
        rows.append(["mean"] + _metric_cells(report.aggregate_mean) + [repr(report.aggregate_mean.run_time)])
        rows.append(["total"] + [""] * len(METRIC_COLUMNS) + [repr(report.aggregate_total_run_time)])
        _write_csv(outdir / "metrics.csv", ("leg",) + METRIC_COLUMNS + ("run_time_s",), rows)
    else:
        failure: Dict[str, Any] = {"outcome": result.outcome_label}
        if isinstance(result.outcome, PartialFailure):
            failure["failing_pair"] = result.outcome.failing_pair
            failure["reason"] = result.outcome.reason.value
            failure["completed_legs"] = [
                {
                    "pair": pair,
                    "waypoints": [[p.x, p.y] for p in path.waypoints],
                    "elapsed_s": path.elapsed,
                }
                for pair, path in result.outcome.completed
            ]
        _write_json(outdir / "outcome.json", failure)


def _sweep_rows(result: SweepResult) -> List[List[str]]:
    rows = []
    for point in result.points:
        successes = sum(1 for r in point.records if r.result.success)
        m = point.mean_metrics
        rows.append(
            [
                repr(float(point.value)),
                str(len(point.records)),
                str(successes),
                repr(point.success_rate),
                _cell(point.mean_total_run_time),
            ]
            + _metric_cells(m)
            + [_cell(m.run_time if m else None)]
        )
    return rows


def _ledger_rows(records) -> List[List[str]]:
    return [
        [r.key, str(r.seed), r.result.outcome_label, _cell(r.result.total_run_time)]
        for r in records
    ]


def _ledger_dicts(records) -> List[Dict[str, Any]]:
    return [
        {
            "key": r.key,
            "seed": r.seed,
            "outcome": r.result.outcome_label,
            "total_run_time_s": r.result.total_run_time,
        }
        for r in records
    ]


def write_sweep_bundle(outdir: FsPath, rc: RunConfig, result: SweepResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    records = [r for point in result.points for r in point.records]
    manifest = _manifest("sweep", rc, _ledger_dicts(records), result.timings)
    _write_json(outdir / "manifest.json", manifest)
    header = (
        "value",
        "trials",
        "successes",
        "success_rate",
        "mean_total_run_time_s",
    ) + METRIC_COLUMNS + ("mean_leg_run_time_s",)
    _write_csv(outdir / "sweep.csv", header, _sweep_rows(result))
    _write_csv(outdir / "ledger.csv", ("key", "seed", "outcome", "total_run_time_s"), _ledger_rows(records))

    xs = [float(p.value) for p in result.points]
    rates = [p.success_rate for p in result.points]
    times = [p.mean_total_run_time for p in result.points]
    param = result.spec.parameter
    (outdir / "success_rate.svg").write_text(
        curves_svg(xs, {"success rate": rates}, param, "success rate", y_range=(0.0, 1.0))
    )
    (outdir / "run_time.svg").write_text(
        curves_svg(xs, {"run time": times}, param, "mean run time (s)")
    )
    save_curves_png(
        outdir / "curves.png",
        xs,
        {"success rate": {"success rate": rates}, "mean run time (s)": {"run time": times}},
        xlabel=param,
        log_x=param == "num_obstacles",
    )


def write_saturate_bundle(outdir: FsPath, rc: RunConfig, result: SaturationResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    summary = {
        "saturation_density": result.saturation_density,
        "ladder_exhausted": result.ladder_exhausted,
        "densities": result.densities,
    }
    manifest = _manifest("saturate", rc, _ledger_dicts(result.records), result.timings, summary)
    _write_json(outdir / "manifest.json", manifest)
    rows = []
    trials = rc.experiment.trials
    for di, density in enumerate(result.densities):
        for kind, rates in result.rates.items():
            rows.append(
                [
                    str(density),
                    kind,
                    str(trials),
                    str(int(round(rates[di] * trials))),
                    repr(rates[di]),
                ]
            )
    _write_csv(
        outdir / "saturation.csv",
        ("density", "planner", "trials", "successes", "success_rate"),
        rows,
    )
    _write_csv(outdir / "ledger.csv", ("key", "seed", "outcome", "total_run_time_s"), _ledger_rows(result.records))
    xs = [float(d) for d in result.densities]
    series = {kind: list(r) for kind, r in result.rates.items()}
    (outdir / "saturation.svg").write_text(
        curves_svg(xs, series, "obstacle count", "success rate", y_range=(0.0, 1.0))
    )
    save_curves_png(
        outdir / "saturation.png",
        xs,
        {"success rate": series},
        xlabel="obstacle count",
        log_x=True,
    )


def write_compare_bundle(outdir: FsPath, rc: RunConfig, result: ComparisonResult) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    records = [r for row in result.rows for r in row.records]
    manifest = _manifest("compare", rc, _ledger_dicts(records), result.timings)
    _write_json(outdir / "manifest.json", manifest)
    arrangement = rc.arrangement.kind if rc.arrangement else "none"
    rows = []
    for row in result.rows:
        m = row.mean_metrics
        rows.append(
            [
                row.kind.value,
                rc.structure_name,
                arrangement,
                str(result.density),
                str(row.trials),
                repr(row.success_rate),
            ]
            + _metric_cells(m)
            + [_cell(m.run_time if m else None), _cell(row.mean_total_run_time)]
        )
    _write_csv(outdir / "comparison.csv", COMPARISON_COLUMNS, rows)
    _write_csv(outdir / "ledger.csv", ("key", "seed", "outcome", "total_run_time_s"), _ledger_rows(records))
    groups = {}
    for row in result.rows:
        m = row.mean_metrics
        groups[row.kind.value] = (
            [m.roughness, m.num_turns, m.offset, m.rmse, m.path_deviation, m.run_time]
            if m
            else [None] * 6
        )
    names = list(METRIC_COLUMNS) + ["mean_run_time_s"]
    title = f"{rc.structure_name} / {arrangement} / {result.density} obstacles"
    (outdir / "metrics.svg").write_text(bars_svg(names, groups, title=title))
    save_bars_png(outdir / "metrics.png", names, groups, title=title)


def _plan_trial_spec(rc: RunConfig) -> TrialSpec:
    return TrialSpec(
        structure=rc.structure,
        arrangement=rc.arrangement,
        planner_cfg=rc.planner,
        trial_seed=rc.seed,
        workspace=rc.workspace,
        clearance=rc.clearance,
        deviation_sample=rc.deviation_sample,
    )


def execute(
    rc: RunConfig,
    command: str,
    outdir: FsPath,
    timings: Optional[TimingLedger] = None,
) -> int:
    """Run a command and write its bundle; returns the process exit code."""
    outdir = FsPath(outdir)
    if command == "plan":
        spec = _plan_trial_spec(rc)
        override = timings.get("plan") if timings is not None else None
        result = run_trial(spec, leg_elapsed_override=override)
        write_plan_bundle(outdir, rc, result)
        return 0 if result.success else 3
    if command == "sweep":
        if rc.experiment.parameter is None:
            raise ConfigError("experiment.parameter: required for sweep")
        if not rc.experiment.values:
            raise ConfigError("experiment.values: required for sweep")
        try:
            spec = SweepSpec(
                parameter=rc.experiment.parameter,
                values=rc.experiment.values,
                base=_plan_trial_spec(rc),
                trials_per_value=rc.experiment.trials,
            )
        except ValueError as exc:
            raise ConfigError(f"experiment: {exc}") from exc
        write_sweep_bundle(outdir, rc, sweep(spec, timings=timings))
        return 0
    if command == "saturate":
        result = saturate(
            rc.structure,
            rc.arrangement.kind if rc.arrangement else "random",
            [rc.planner_for(k) for k in rc.experiment.planners],
            rc.experiment.ladder,
            rc.experiment.trials,
            batch_seed=rc.seed,
            workspace=rc.workspace,
            clearance=rc.clearance,
            margin=rc.margin,
            deviation_sample=rc.deviation_sample,
            timings=timings,
        )
        write_saturate_bundle(outdir, rc, result)
        return 0
    if command == "compare":
        arrangement = rc.arrangement
        if arrangement is None:
            raise ConfigError("obstacles: compare needs an obstacle arrangement")
        arrangement = replace(arrangement, count=rc.experiment.density)
        result = compare(
            rc.structure,
            arrangement,
            [rc.planner_for(k) for k in rc.experiment.planners],
            rc.experiment.trials,
            batch_seed=rc.seed,
            workspace=rc.workspace,
            clearance=rc.clearance,
            deviation_sample=rc.deviation_sample,
            timings=timings,
        )
        write_compare_bundle(outdir, rc, result)
        return 0
    raise ConfigError(f"unknown command {command!r}")


def replay(manifest_path: FsPath, outdir: FsPath) -> int:
    """Re-run a bundle from its manifest, reusing the recorded timings.

    Everything except wall-clock time is recomputed from the recorded seeds;
    the timing ledger is replayed verbatim, so the emitted files match the
    original bundle byte for byte.
    """
    data = json.loads(FsPath(manifest_path).read_text())
    rc = run_config_from_echo(data["config"])
    timings = {key: [float(t) for t in ts] for key, ts in data["timings"].items()}
    return execute(rc, data["command"], FsPath(outdir), timings=timings)


def export_moves(toolpath: Toolpath, outdir: FsPath, fmt: str = "both") -> List[FsPath]:
    """Emit the toolpath as an ordered list of linear moves.

    The plain-text form is one move per line: `MOVE <x> <y>` with fixed
    3-decimal coordinates. Consecutive legs share their junction vertex, so
    each leg after the first starts at its second waypoint.
    """
    moves: List[Point2] = []
    for li, (_, path) in enumerate(toolpath.legs):
        pts = path.waypoints if li == 0 else path.waypoints[1:]
        moves.extend(pts)
    written = []
    if fmt in ("text", "both"):
        text_path = FsPath(outdir) / "moves.txt"
        text_path.write_text("".join(f"MOVE {p.x:.3f} {p.y:.3f}\n" for p in moves))
        written.append(text_path)
    if fmt in ("json", "both"):
        json_path = FsPath(outdir) / "moves.json"
        _write_json(
            json_path,
            [{"command": "move", "x": p.x, "y": p.y} for p in moves],
        )
        written.append(json_path)
    return written
