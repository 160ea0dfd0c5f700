"""Run configuration: file loading, flag merging, validation, digesting.

Config files are TOML (key/value pairs plus nested tables). Every module
level invariant is checked at load time; violations raise ConfigError with
the offending key path so the message points at the line to fix. CLI flags
override file values, and the fully resolved configuration is echoed into
each result manifest so bundles are self-describing.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .environment import ArrangementSpec, Workspace
from .geometry import Point2
from .metrics import DEVIATION_SAMPLES
from .pgf import PRESETS, StructureSpec
from .planners import PlannerConfig, PlannerKind

TOOL_NAME = "printpath"
TOOL_VERSION = "0.1.0"

SWEEP_PARAM_ALIASES = {
    "num-obstacles": "num_obstacles",
    "grid-size": "grid_size",
    "expansion-length": "expansion_length",
    "num-neighbors": "num_neighbors",
    "max-edge-length": "max_edge_length",
}

DEFAULT_LADDER = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)


class ConfigError(Exception):
    """Invalid configuration; message names the offending key."""


@dataclass(frozen=True)
class ExperimentConfig:
    trials: int = 20
    parameter: Optional[str] = None
    values: Tuple[float, ...] = ()
    ladder: Tuple[int, ...] = DEFAULT_LADDER
    density: int = 64
    planners: Tuple[PlannerKind, ...] = (
        PlannerKind.DIJKSTRA,
        PlannerKind.ASTAR,
        PlannerKind.PRM,
        PlannerKind.RRT,
    )


@dataclass(frozen=True)
class RunConfig:
    workspace: Workspace = Workspace()
    clearance: float = 10.0
    margin: float = 50.0
    structure: StructureSpec = PRESETS["open-default"]
    structure_name: str = "open-default"
    arrangement: Optional[ArrangementSpec] = None
    planner: PlannerConfig = PlannerConfig()
    experiment: ExperimentConfig = ExperimentConfig()
    deviation_sample: str = "midpoint"
    seed: int = 0
    output_dir: str = "results"

    def planner_for(self, kind: PlannerKind) -> PlannerConfig:
        return replace(self.planner, kind=kind)

    def echo(self) -> Dict[str, Any]:
        """The full resolved configuration, as plain JSON-able data."""
        ws = self.workspace
        out: Dict[str, Any] = {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "deviation_sample": self.deviation_sample,
            "workspace": {
                "min_x": ws.min_x, "min_y": ws.min_y, "max_x": ws.max_x, "max_y": ws.max_y,
            },
            "environment": {"clearance": self.clearance, "margin": self.margin},
            "structure": {
                "name": self.structure_name,
                "vertices": [[v.x, v.y] for v in self.structure.vertices],
                "closed": self.structure.closed,
            },
            "planner": {
                "kind": self.planner.kind.value,
                "path_resolution": self.planner.path_resolution,
                "grid_size": self.planner.grid_size,
                "expansion_length": self.planner.expansion_length,
                "goal_sample_rate": self.planner.goal_sample_rate,
                "max_iterations": self.planner.max_iterations,
                "num_samples": self.planner.num_samples,
                "num_neighbors": self.planner.num_neighbors,
                "max_edge_length": self.planner.max_edge_length,
            },
            "experiment": {
                "trials": self.experiment.trials,
                "parameter": self.experiment.parameter,
                "values": list(self.experiment.values),
                "ladder": list(self.experiment.ladder),
                "density": self.experiment.density,
                "planners": [k.value for k in self.experiment.planners],
            },
        }
        if self.arrangement is None:
            out["obstacles"] = {"kind": "none"}
        else:
            out["obstacles"] = {
                "kind": self.arrangement.kind,
                "count": self.arrangement.count,
                "margin": self.arrangement.margin,
            }
        return out

    def digest(self) -> str:
        payload = json.dumps(self.echo(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()


def _get(table: Dict[str, Any], path: str, key: str, kind, default):
    if key not in table:
        return default
    value = table[key]
    where = f"{path}.{key}" if path else key
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"{where}: expected {getattr(kind, '__name__', kind)}")
    return value


def load_config_file(path: str) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        # tomllib reports line and column in its message.
        raise ConfigError(f"{path}: {exc}") from exc


def parse_arrangement(text: str, margin: float) -> Optional[ArrangementSpec]:
    """Parse an obstacles flag such as "random:256", "periodic:128", "none"."""
    if text == "none":
        return None
    kind, sep, count_text = text.partition(":")
    if not sep:
        raise ConfigError("obstacles: expected KIND:COUNT, e.g. random:256")
    try:
        count = int(count_text)
    except ValueError as exc:
        raise ConfigError(f"obstacles: count {count_text!r} is not an integer") from exc
    try:
        return ArrangementSpec(kind, count, margin=margin)
    except ValueError as exc:
        raise ConfigError(f"obstacles: {exc}") from exc


def parse_values(text: str) -> Tuple[float, ...]:
    """Parse sweep values: "2:20:2" (inclusive range) or "2,4,8"."""
    if ":" in text:
        pieces = text.split(":")
        if len(pieces) != 3:
            raise ConfigError("values: expected START:STOP:STEP")
        try:
            start, stop, step = (float(p) for p in pieces)
        except ValueError as exc:
            raise ConfigError(f"values: {text!r} is not numeric") from exc
        if step <= 0:
            raise ConfigError("values: step must be positive")
        out: List[float] = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 9))
            v += step
        return tuple(out)
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"values: {text!r} is not numeric") from exc


def parse_vertices(text: str) -> Tuple[Point2, ...]:
    """Parse explicit vertices: "100,100;700,700"."""
    points = []
    for piece in text.split(";"):
        coords = piece.split(",")
        if len(coords) != 2:
            raise ConfigError(f"vertices: expected x,y pairs separated by ';', got {piece!r}")
        try:
            points.append(Point2(float(coords[0]), float(coords[1])))
        except ValueError as exc:
            raise ConfigError(f"vertices: {piece!r} is not numeric") from exc
    return tuple(points)


def _structure_from(data: Dict[str, Any]) -> Tuple[StructureSpec, str]:
    preset = data.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"structure.preset: unknown preset {preset!r}; choose from {sorted(PRESETS)}"
            )
        return PRESETS[preset], preset
    if "vertices" in data:
        raw = data["vertices"]
        try:
            vertices = tuple(Point2(float(p[0]), float(p[1])) for p in raw)
            return StructureSpec(vertices, bool(data.get("closed", False))), "custom"
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"structure.vertices: {exc}") from exc
    raise ConfigError("structure: set either 'preset' or 'vertices'")


def build_run_config(
    file_data: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """Merge file data and CLI overrides over the defaults, then validate."""
    data = dict(file_data or {})
    ov = dict(overrides or {})

    def pick(name: str, value):
        return ov[name] if ov.get(name) is not None else value

    ws_data = data.get("workspace", {})
    try:
        workspace = Workspace(
            _get(ws_data, "workspace", "min_x", float, 0.0),
            _get(ws_data, "workspace", "min_y", float, 0.0),
            _get(ws_data, "workspace", "max_x", float, 800.0),
            _get(ws_data, "workspace", "max_y", float, 800.0),
        )
    except ValueError as exc:
        raise ConfigError(f"workspace: {exc}") from exc

    env_data = data.get("environment", {})
    clearance = pick("clearance", _get(env_data, "environment", "clearance", float, 10.0))
    margin = pick("margin", _get(env_data, "environment", "margin", float, 50.0))
    if clearance <= 0:
        raise ConfigError("environment.clearance: must be > 0")
    if margin < 0:
        raise ConfigError("environment.margin: must be >= 0")

    structure_data = dict(data.get("structure", {"preset": "open-default"}))
    if ov.get("preset") is not None:
        structure_data = {"preset": ov["preset"]}
    if ov.get("vertices") is not None:
        structure_data = {"vertices": ov["vertices"], "closed": bool(ov.get("closed", False))}
    structure, structure_name = _structure_from(structure_data)
    try:
        structure.validate_in(workspace)
    except ValueError as exc:
        raise ConfigError(f"structure.vertices: {exc}") from exc

    arrangement: Optional[ArrangementSpec] = None
    obstacles_data = data.get("obstacles")
    if obstacles_data:
        kind = _get(obstacles_data, "obstacles", "kind", str, "none")
        if kind != "none":
            try:
                arrangement = ArrangementSpec(
                    kind,
                    _get(obstacles_data, "obstacles", "count", int, 1),
                    margin=_get(obstacles_data, "obstacles", "margin", float, margin),
                )
            except ValueError as exc:
                raise ConfigError(f"obstacles: {exc}") from exc
    if "arrangement" in ov and ov["arrangement"] is not None:
        arrangement = ov["arrangement"]

    planner_data = data.get("planner", {})
    kind_text = pick("planner_kind", _get(planner_data, "planner", "kind", str, "dijkstra"))
    try:
        kind = PlannerKind(kind_text)
    except ValueError as exc:
        raise ConfigError(
            f"planner.kind: unknown planner {kind_text!r}; choose from "
            f"{[k.value for k in PlannerKind]}"
        ) from exc
    base = PlannerConfig()
    planner = PlannerConfig(
        kind=kind,
        path_resolution=pick(
            "path_resolution",
            _get(planner_data, "planner", "path_resolution", float, base.path_resolution),
        ),
        grid_size=pick(
            "grid_size", _get(planner_data, "planner", "grid_size", float, base.grid_size)
        ),
        expansion_length=pick(
            "expansion_length",
            _get(planner_data, "planner", "expansion_length", float, base.expansion_length),
        ),
        goal_sample_rate=pick(
            "goal_sample_rate",
            _get(planner_data, "planner", "goal_sample_rate", float, base.goal_sample_rate),
        ),
        max_iterations=pick(
            "max_iterations",
            _get(planner_data, "planner", "max_iterations", int, base.max_iterations),
        ),
        num_samples=pick(
            "num_samples", _get(planner_data, "planner", "num_samples", int, base.num_samples)
        ),
        num_neighbors=pick(
            "num_neighbors",
            _get(planner_data, "planner", "num_neighbors", int, base.num_neighbors),
        ),
        max_edge_length=pick(
            "max_edge_length",
            _get(planner_data, "planner", "max_edge_length", float, base.max_edge_length),
        ),
    )
    try:
        planner.validate()
    except ValueError as exc:
        raise ConfigError(f"planner: {exc}") from exc

    exp_data = data.get("experiment", {})
    parameter = pick("param", _get(exp_data, "experiment", "parameter", str, None))
    if parameter is not None:
        parameter = SWEEP_PARAM_ALIASES.get(parameter, parameter)
    values = ov.get("values")
    if values is None:
        raw_values = exp_data.get("values", [])
        try:
            values = tuple(float(v) for v in raw_values)
        except (TypeError, ValueError) as exc:
            raise ConfigError("experiment.values: expected a numeric list") from exc
    ladder = ov.get("ladder")
    if ladder is None:
        raw_ladder = exp_data.get("ladder", list(DEFAULT_LADDER))
        try:
            ladder = tuple(int(v) for v in raw_ladder)
        except (TypeError, ValueError) as exc:
            raise ConfigError("experiment.ladder: expected an integer list") from exc
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ConfigError("experiment.ladder: densities must be strictly increasing")
    planner_names = ov.get("planners")
    if planner_names is None:
        planner_names = exp_data.get(
            "planners", [k.value for k in ExperimentConfig().planners]
        )
    try:
        exp_planners = tuple(PlannerKind(name) for name in planner_names)
    except ValueError as exc:
        raise ConfigError(f"experiment.planners: {exc}") from exc
    trials = pick("trials", _get(exp_data, "experiment", "trials", int, 20))
    if trials < 1:
        raise ConfigError("experiment.trials: must be >= 1")
    density = pick("density", _get(exp_data, "experiment", "density", int, 64))
    if density < 1:
        raise ConfigError("experiment.density: must be >= 1")
    experiment = ExperimentConfig(
        trials=trials,
        parameter=parameter,
        values=tuple(values),
        ladder=tuple(ladder),
        density=density,
        planners=exp_planners,
    )

    deviation_sample = pick(
        "deviation_sample", _get(data, "", "deviation_sample", str, "midpoint")
    )
    if deviation_sample not in DEVIATION_SAMPLES:
        raise ConfigError(f"deviation_sample: must be one of {DEVIATION_SAMPLES}")
    seed = pick("seed", _get(data, "", "seed", int, 0))
    if seed < 0:
        raise ConfigError("seed: must be a non-negative integer")
    output_dir = pick("out", _get(data, "", "output_dir", str, "results"))

    return RunConfig(
        workspace=workspace,
        clearance=clearance,
        margin=margin,
        structure=structure,
        structure_name=structure_name,
        arrangement=arrangement,
        planner=planner,
        experiment=experiment,
        deviation_sample=deviation_sample,
        seed=seed,
        output_dir=output_dir,
    )


def run_config_from_echo(echo: Dict[str, Any]) -> RunConfig:
    """Rebuild a RunConfig from a manifest's config echo (for replay)."""
    ws = echo["workspace"]
    data: Dict[str, Any] = {
        "seed": echo["seed"],
        "output_dir": echo["output_dir"],
        "deviation_sample": echo["deviation_sample"],
        "workspace": ws,
        "environment": echo["environment"],
        "planner": echo["planner"],
        "experiment": {
            k: v for k, v in echo["experiment"].items() if v is not None
        },
        "obstacles": echo["obstacles"],
    }
    name = echo["structure"]["name"]
    if name in PRESETS:
        data["structure"] = {"preset": name}
    else:
        data["structure"] = {
            "vertices": echo["structure"]["vertices"],
            "closed": echo["structure"]["closed"],
        }
    cfg = build_run_config(data)
    if cfg.echo() != echo:
        raise ConfigError("manifest config echo does not round-trip")
    return cfg
