"""Rapidly-exploring random tree planner.

Each iteration samples a workspace point (the goal with probability
goal_sample_rate), extends the nearest tree node by at most expansion_length
toward it when the extension passes the sampled collision check, and succeeds
as soon as any node connects to the goal by a free segment no longer than
expansion_length. Seeded and replayable; ties in the nearest-node search
resolve to the oldest node.
"""

from __future__ import annotations

import math
import time
from typing import List

import numpy as np

from ..environment import Environment
from ..geometry import Point2, Segment
from .base import Failure, FailureReason, Path, PlanOutcome, PlannerConfig, PlannerKind


def _connects_to_goal(p: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> bool:
    if math.dist(p, goal) > cfg.expansion_length:
        return False
    return env.segment_free(Segment(p, goal), cfg.path_resolution)


def _solve(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig):
    if not (env.is_free(start) and env.is_free(goal)):
        return Failure(FailureReason.INVALID_QUERY)
    from ..seeding import make_rng

    rng = make_rng(cfg.seed)
    ws = env.workspace

    if _connects_to_goal(start, goal, env, cfg):
        return [start, goal]

    nodes = np.empty((cfg.max_iterations + 1, 2))
    parents = np.full(cfg.max_iterations + 1, -1, dtype=np.int64)
    nodes[0] = start
    n = 1

    for _ in range(cfg.max_iterations):
        if rng.random() < cfg.goal_sample_rate:
            target = goal
        else:
            target = Point2(
                float(rng.uniform(ws.min_x, ws.max_x)),
                float(rng.uniform(ws.min_y, ws.max_y)),
            )
        d2 = (nodes[:n, 0] - target.x) ** 2 + (nodes[:n, 1] - target.y) ** 2
        i = int(np.argmin(d2))
        dist = math.sqrt(d2[i])
        if dist < 1e-12:
            continue
        near = Point2(float(nodes[i, 0]), float(nodes[i, 1]))
        if dist <= cfg.expansion_length:
            new = target
        else:
            f = cfg.expansion_length / dist
            new = Point2(near.x + (target.x - near.x) * f, near.y + (target.y - near.y) * f)
        if not env.segment_free(Segment(near, new), cfg.path_resolution):
            continue
        nodes[n] = new
        parents[n] = i
        n += 1
        if _connects_to_goal(new, goal, env, cfg):
            chain: List[Point2] = []
            k = n - 1
            while k >= 0:
                chain.append(Point2(float(nodes[k, 0]), float(nodes[k, 1])))
                k = int(parents[k])
            chain.reverse()
            if chain[-1] != goal:
                chain.append(goal)
            return chain
    return Failure(FailureReason.ITERATION_CAP)


def plan_rrt(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> PlanOutcome:
    t0 = time.perf_counter()
    result = _solve(start, goal, env, cfg)
    elapsed = time.perf_counter() - t0
    if isinstance(result, Failure):
        return result
    return Path(waypoints=tuple(result), planner=PlannerKind.RRT, elapsed=elapsed)
