"""Toolpath assembly: plan between consecutive fixed vertices, in order.

An open structure with n vertices yields n-1 legs; a closed structure adds
the closing leg back to the first vertex. Legs are planned independently
with per-leg seeds derived from (config seed, leg index), so a full run is
replayable and legs could safely be planned concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Tuple, Union

from .environment import Environment, Workspace
from .geometry import ATOL, Point2
from .planners import Failure, FailureReason, Path, PlannerConfig, plan
from .seeding import derive_seed


@dataclass(frozen=True)
class StructureSpec:
    """Ordered fixed vertices plus the open/closed flag."""

    vertices: Tuple[Point2, ...]
    closed: bool = False

    def __post_init__(self) -> None:
        vertices = tuple(Point2(float(p[0]), float(p[1])) for p in self.vertices)
        object.__setattr__(self, "vertices", vertices)
        if len(vertices) < 2:
            raise ValueError("a structure needs at least two vertices")
        if len(set(vertices)) != len(vertices):
            raise ValueError("structure vertices must be distinct")

    def validate_in(self, ws: Workspace) -> None:
        for v in self.vertices:
            if not ws.contains(v):
                raise ValueError(f"structure vertex {v} lies outside the workspace")

    def pairs(self) -> Tuple[Tuple[int, int], ...]:
        n = len(self.vertices)
        out = [(i, i + 1) for i in range(n - 1)]
        if self.closed:
            out.append((n - 1, 0))
        return tuple(out)

    @property
    def leg_count(self) -> int:
        return len(self.pairs())


# Built-in presets: the straight wall and the hexagon.
OPEN_DEFAULT = StructureSpec((Point2(100.0, 100.0), Point2(700.0, 700.0)), closed=False)
HEXAGON_DEFAULT = StructureSpec(
    (
        Point2(700.0, 480.0),
        Point2(480.0, 700.0),
        Point2(180.0, 619.0),
        Point2(100.0, 319.0),
        Point2(319.0, 100.0),
        Point2(619.0, 180.0),
    ),
    closed=True,
)

PRESETS = {"open-default": OPEN_DEFAULT, "hexagon-default": HEXAGON_DEFAULT}


@dataclass(frozen=True)
class Toolpath:
    structure: StructureSpec
    legs: Tuple[Tuple[int, Path], ...]

    @property
    def total_elapsed(self) -> float:
        return sum(path.elapsed for _, path in self.legs)


@dataclass(frozen=True)
class PartialFailure:
    """Planning stopped at `failing_pair`; completed legs are kept."""

    structure: StructureSpec
    completed: Tuple[Tuple[int, Path], ...]
    failing_pair: int
    reason: FailureReason


PgfOutcome = Union[Toolpath, PartialFailure]


def normalize(path: Path) -> Path:
    """Drop consecutive duplicate waypoints (closer than 1e-9 mm).

    Idempotent; both endpoints are preserved exactly.
    """
    pts = path.waypoints
    kept: List[Point2] = [pts[0]]
    for p in pts[1:]:
        if math.dist(p, kept[-1]) >= ATOL:
            kept.append(p)
    if kept[-1] != pts[-1]:
        if len(kept) > 1:
            kept[-1] = pts[-1]
        else:
            kept.append(pts[-1])
    return replace(path, waypoints=tuple(kept))


def generate_toolpath(
    structure: StructureSpec, env: Environment, cfg: PlannerConfig
) -> PgfOutcome:
    """Plan every vertex pair in order with the configured planner.

    Stops at the first failing pair and reports it with the legs completed
    so far; re-routing the structure around a failed leg is not attempted.
    """
    legs: List[Tuple[int, Path]] = []
    for k, (i, j) in enumerate(structure.pairs()):
        leg_cfg = replace(cfg, seed=derive_seed(cfg.seed, k))
        outcome = plan(structure.vertices[i], structure.vertices[j], env, leg_cfg)
        if isinstance(outcome, Failure):
            return PartialFailure(structure, tuple(legs), k, outcome.reason)
        legs.append((k, normalize(outcome)))
    return Toolpath(structure, tuple(legs))
