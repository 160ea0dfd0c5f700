"""Search-based planning on an 8-connected lattice over the workspace.

Node (i, j) sits at (min_x + i * grid_size, min_y + j * grid_size). Axis
moves cost grid_size, diagonal moves grid_size * sqrt(2). A node is blocked
when its coordinate is not free; a diagonal move additionally requires both
adjacent axis neighbors to be free (no corner cutting), and every edge must
pass the sampled collision check at path_resolution. Queries snap to the
nearest free node reachable by a free stub segment, and the exact query
points are prepended/appended so path endpoints are exact.

Tie-breaking is fixed — Dijkstra pops by (cost, node index), A* by
(f, h, node index) — so equal-cost instances always return the same path.
"""

from __future__ import annotations

import heapq
import math
import time
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..environment import Environment
from ..geometry import Point2, Segment
from .base import Failure, FailureReason, Path, PlanOutcome, PlannerConfig, PlannerKind

SQRT2 = math.sqrt(2.0)

# Fixed neighbor order: axis moves first, then diagonals.
_DIRS: Tuple[Tuple[int, int], ...] = (
    (1, 0), (-1, 0), (0, 1), (0, -1),
    (1, 1), (1, -1), (-1, 1), (-1, -1),
)


class GridGraph:
    """The lattice a grid query runs on, with collision-aware edges."""

    def __init__(self, env: Environment, grid_size: float, path_resolution: float):
        self.env = env
        self.grid_size = grid_size
        self.path_resolution = path_resolution
        ws = env.workspace
        self.nx = int(math.floor(ws.width / grid_size)) + 1
        self.ny = int(math.floor(ws.height / grid_size)) + 1
        ix = np.arange(self.nx)
        iy = np.arange(self.ny)
        gx, gy = np.meshgrid(ix, iy, indexing="ij")
        self.coords = np.column_stack(
            [ws.min_x + gx.ravel() * grid_size, ws.min_y + gy.ravel() * grid_size]
        )
        self.free = env.free_mask(self.coords)
        # Interior sample fractions per direction; empty when the edge is
        # shorter than the collision sampling pitch.
        self._fracs: List[np.ndarray] = []
        self._cost: List[float] = []
        for dx, dy in _DIRS:
            length = grid_size * math.hypot(dx, dy)
            k = math.ceil(length / path_resolution)
            self._fracs.append(np.arange(1, k) / k)
            self._cost.append(grid_size * (SQRT2 if dx and dy else 1.0))
        self._edge_memo: Dict[Tuple[int, int], bool] = {}

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def node_point(self, u: int) -> Point2:
        return Point2(float(self.coords[u, 0]), float(self.coords[u, 1]))

    def _edge_interior_free(self, u: int, d: int) -> bool:
        fracs = self._fracs[d]
        if len(fracs) == 0:
            return True
        key = (u, d)
        cached = self._edge_memo.get(key)
        if cached is not None:
            return cached
        dx, dy = _DIRS[d]
        pts = self.coords[u] + np.outer(fracs, (dx * self.grid_size, dy * self.grid_size))
        ok = bool(self.env.free_mask(pts).all())
        self._edge_memo[key] = ok
        return ok

    def neighbors(self, u: int) -> Iterator[Tuple[int, float]]:
        ix, iy = divmod(u, self.ny)
        free = self.free
        for d, (dx, dy) in enumerate(_DIRS):
            jx = ix + dx
            jy = iy + dy
            if not (0 <= jx < self.nx and 0 <= jy < self.ny):
                continue
            v = jx * self.ny + jy
            if not free[v]:
                continue
            if dx and dy:
                # No cutting corners past a blocked axis neighbor.
                if not (free[(ix + dx) * self.ny + iy] and free[ix * self.ny + iy + dy]):
                    continue
            if not self._edge_interior_free(u, d):
                continue
            yield v, self._cost[d]

    def snap(self, p: Point2) -> Optional[int]:
        """Nearest free node connectable to p by a free stub segment."""
        d2 = (self.coords[:, 0] - p.x) ** 2 + (self.coords[:, 1] - p.y) ** 2
        order = np.lexsort((np.arange(self.size), d2))
        for u in order:
            if not self.free[u]:
                continue
            if self.env.segment_free(Segment(p, self.node_point(int(u))), self.path_resolution):
                return int(u)
        return None


def grid_steps_cost(points: Sequence[Point2], grid_size: float) -> float:
    """Canonical cost of a lattice polyline: axis steps + sqrt(2) diagonals.

    Raises ValueError if a step is not a single king move of the lattice.
    """
    axis = 0
    diag = 0
    for a, b in zip(points, points[1:]):
        dx = round((b.x - a.x) / grid_size)
        dy = round((b.y - a.y) / grid_size)
        if (dx, dy) not in _DIRS:
            raise ValueError(f"not a unit lattice step: {a} -> {b}")
        if dx and dy:
            diag += 1
        else:
            axis += 1
    return axis * grid_size + diag * grid_size * SQRT2


def _search(
    start: Point2,
    goal: Point2,
    env: Environment,
    cfg: PlannerConfig,
    use_heuristic: bool,
) -> "PlanOutcome | List[Point2]":
    if not (env.is_free(start) and env.is_free(goal)):
        return Failure(FailureReason.INVALID_QUERY)
    graph = GridGraph(env, cfg.grid_size, cfg.path_resolution)
    s = graph.snap(start)
    g = graph.snap(goal)
    if s is None or g is None:
        return Failure(FailureReason.NO_ROUTE)

    goal_pt = graph.node_point(g)

    def h(u: int) -> float:
        if not use_heuristic:
            return 0.0
        return math.dist(graph.node_point(u), goal_pt)

    dist: Dict[int, float] = {s: 0.0}
    parent: Dict[int, int] = {}
    closed: Dict[int, bool] = {}
    hs = h(s)
    heap: List[Tuple] = [(hs, hs, s) if use_heuristic else (0.0, s)]
    found = False
    while heap:
        entry = heapq.heappop(heap)
        u = entry[-1]
        if closed.get(u):
            continue
        closed[u] = True
        if u == g:
            found = True
            break
        du = dist[u]
        for v, w in graph.neighbors(u):
            nd = du + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                parent[v] = u
                if use_heuristic:
                    hv = h(v)
                    heapq.heappush(heap, (nd + hv, hv, v))
                else:
                    heapq.heappush(heap, (nd, v))
    if not found:
        return Failure(FailureReason.NO_ROUTE)

    nodes = [g]
    while nodes[-1] != s:
        nodes.append(parent[nodes[-1]])
    nodes.reverse()
    return [start] + [graph.node_point(u) for u in nodes] + [goal]


def _planned(start, goal, env, cfg, kind: PlannerKind, use_heuristic: bool) -> PlanOutcome:
    t0 = time.perf_counter()
    result = _search(start, goal, env, cfg, use_heuristic)
    elapsed = time.perf_counter() - t0
    if isinstance(result, Failure):
        return result
    return Path(waypoints=tuple(result), planner=kind, elapsed=elapsed)


def plan_dijkstra(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> PlanOutcome:
    """Minimum-cost path on the lattice, exact endpoints attached."""
    return _planned(start, goal, env, cfg, PlannerKind.DIJKSTRA, use_heuristic=False)


def plan_astar(start: Point2, goal: Point2, env: Environment, cfg: PlannerConfig) -> PlanOutcome:
    """Same graph and costs as plan_dijkstra with a Euclidean heuristic.

    The heuristic is admissible and consistent for these motion costs, so the
    returned cost always matches plan_dijkstra's.
    """
    return _planned(start, goal, env, cfg, PlannerKind.ASTAR, use_heuristic=True)
