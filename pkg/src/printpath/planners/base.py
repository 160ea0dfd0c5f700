"""Shared planner types: configuration, outcomes, failure reasons."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

from ..geometry import Point2


class PlannerKind(str, Enum):
    DIJKSTRA = "dijkstra"
    ASTAR = "astar"
    RRT = "rrt"
    PRM = "prm"


class FailureReason(str, Enum):
    NO_ROUTE = "no_route"
    ITERATION_CAP = "iteration_cap"
    INVALID_QUERY = "invalid_query"


@dataclass(frozen=True)
class PlannerConfig:
    """Per-planner parameters; defaults follow the tuned values.

    Fields not used by a given planner kind are ignored by it: grid_size
    drives the search-based planners, expansion_length / goal_sample_rate /
    max_iterations drive the tree planner, num_samples / num_neighbors /
    max_edge_length drive the roadmap planner. path_resolution (the collision
    sampling pitch, set to the printed filament width) applies to all four.
    """

    kind: PlannerKind = PlannerKind.DIJKSTRA
    path_resolution: float = 20.0
    grid_size: float = 12.0
    expansion_length: float = 20.0
    goal_sample_rate: float = 0.05
    max_iterations: int = 5000
    num_samples: int = 500
    num_neighbors: int = 10
    max_edge_length: float = 410.0
    seed: int = 0

    def validate(self) -> None:
        if self.path_resolution <= 0.0:
            raise ValueError("path_resolution must be > 0")
        if self.grid_size <= 0.0:
            raise ValueError("grid_size must be > 0")
        if self.expansion_length <= 0.0:
            raise ValueError("expansion_length must be > 0")
        if not 0.0 <= self.goal_sample_rate <= 1.0:
            raise ValueError("goal_sample_rate must lie in [0, 1]")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.num_samples < 0:
            raise ValueError("num_samples must be >= 0")
        if self.num_neighbors < 1:
            raise ValueError("num_neighbors must be >= 1")
        if self.max_edge_length <= 0.0:
            raise ValueError("max_edge_length must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class Path:
    """A collision-free polyline from the query start to the query goal."""

    waypoints: Tuple[Point2, ...]
    planner: PlannerKind
    elapsed: float = 0.0


@dataclass(frozen=True)
class Failure:
    reason: FailureReason


PlanOutcome = Union[Path, Failure]
