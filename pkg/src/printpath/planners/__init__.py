"""The four path planners behind one dispatch function."""

from __future__ import annotations

from ..environment import Environment
from ..geometry import Point2
from .base import Failure, FailureReason, Path, PlanOutcome, PlannerConfig, PlannerKind
from .grid import GridGraph, grid_steps_cost, plan_astar, plan_dijkstra
from .prm import knn_candidates, plan_prm, sample_free_points
from .rrt import plan_rrt

_PLANNERS = {
    PlannerKind.DIJKSTRA: plan_dijkstra,
    PlannerKind.ASTAR: plan_astar,
    PlannerKind.RRT: plan_rrt,
    PlannerKind.PRM: plan_prm,
}


def plan(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> PlanOutcome:
    """Run the planner selected by cfg.kind on one start/goal query."""
    return _PLANNERS[cfg.kind](start, goal, env, cfg)


__all__ = [
    "Environment",
    "Failure",
    "FailureReason",
    "GridGraph",
    "Path",
    "PlanOutcome",
    "PlannerConfig",
    "PlannerKind",
    "grid_steps_cost",
    "knn_candidates",
    "plan",
    "plan_astar",
    "plan_dijkstra",
    "plan_prm",
    "plan_rrt",
    "sample_free_points",
]
