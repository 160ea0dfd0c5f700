"""Probabilistic roadmap planner.

Samples free points uniformly over the workspace by rejection, adds the
query endpoints, links each node to its k nearest nodes when the connecting
segment is collision-free and no longer than max_edge_length, then runs
Dijkstra over the roadmap. Seeded and replayable.
"""

from __future__ import annotations

import heapq
import math
import time
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..environment import Environment, WorkspaceSaturatedError
from ..geometry import Point2, Segment
from ..seeding import make_rng
from .base import Failure, FailureReason, Path, PlanOutcome, PlannerConfig, PlannerKind

_DRAW_CAP_FACTOR = 10_000
_DRAW_BATCH = 256


def sample_free_points(env: Environment, count: int, rng: np.random.Generator) -> List[Point2]:
    """Uniform rejection sampling of free workspace points.

    Raises WorkspaceSaturatedError after 10,000 draws per requested point.
    """
    if count == 0:
        return []
    ws = env.workspace
    low = np.array([ws.min_x, ws.min_y])
    high = np.array([ws.max_x, ws.max_y])
    cap = _DRAW_CAP_FACTOR * count
    out: List[Point2] = []
    examined = 0
    while len(out) < count:
        if examined >= cap:
            raise WorkspaceSaturatedError("workspace saturated")
        batch = rng.uniform(low, high, size=(_DRAW_BATCH, 2))
        free = env.free_mask(batch)
        done_at = _DRAW_BATCH
        for idx in np.flatnonzero(free):
            out.append(Point2(float(batch[idx, 0]), float(batch[idx, 1])))
            if len(out) == count:
                done_at = int(idx) + 1
                break
        examined += done_at
    return out


def knn_candidates(points: Sequence[Point2], k: int) -> List[List[Tuple[int, float]]]:
    """Per node: its k nearest other nodes as (index, distance), by distance.

    This is the candidate set before collision/length filtering, so no node
    ever proposes more than k outgoing edges.
    """
    n = len(points)
    if n <= 1 or k < 1:
        return [[] for _ in range(n)]
    arr = np.asarray(points, dtype=float)
    tree = cKDTree(arr)
    kk = min(k + 1, n)
    dists, idxs = tree.query(arr, k=kk)
    if kk == 1:
        dists = dists[:, None]
        idxs = idxs[:, None]
    out: List[List[Tuple[int, float]]] = []
    for u in range(n):
        row = [
            (int(v), float(d))
            for v, d in zip(idxs[u], dists[u])
            if int(v) != u
        ][:k]
        out.append(row)
    return out


def _solve(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig):
    if not (env.is_free(start) and env.is_free(goal)):
        return Failure(FailureReason.INVALID_QUERY)
    rng = make_rng(cfg.seed)
    nodes = sample_free_points(env, cfg.num_samples, rng)
    s = len(nodes)
    g = s + 1
    nodes = nodes + [start, goal]

    adjacency: Dict[int, List[Tuple[int, float]]] = {u: [] for u in range(len(nodes))}
    checked: Dict[Tuple[int, int], bool] = {}
    for u, candidates in enumerate(knn_candidates(nodes, cfg.num_neighbors)):
        for v, d in candidates:
            if d > cfg.max_edge_length:
                continue
            key = (u, v) if u < v else (v, u)
            ok = checked.get(key)
            if ok is None:
                ok = env.segment_free(Segment(nodes[u], nodes[v]), cfg.path_resolution)
                checked[key] = ok
            if ok and v not in (w for w, _ in adjacency[u]):
                adjacency[u].append((v, d))
                adjacency[v].append((u, d))

    dist: Dict[int, float] = {s: 0.0}
    parent: Dict[int, int] = {}
    closed: Dict[int, bool] = {}
    heap: List[Tuple[float, int]] = [(0.0, s)]
    found = False
    while heap:
        _, u = heapq.heappop(heap)
        if closed.get(u):
            continue
        closed[u] = True
        if u == g:
            found = True
            break
        du = dist[u]
        for v, w in adjacency[u]:
            nd = du + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    if not found:
        return Failure(FailureReason.NO_ROUTE)

    chain = [g]
    while chain[-1] != s:
        chain.append(parent[chain[-1]])
    chain.reverse()
    return [nodes[u] for u in chain]


def plan_prm(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> PlanOutcome:
    t0 = time.perf_counter()
    result = _solve(start, goal, env, cfg)
    elapsed = time.perf_counter() - t0
    if isinstance(result, Failure):
        return result
    return Path(waypoints=tuple(result), planner=PlannerKind.PRM, elapsed=elapsed)
