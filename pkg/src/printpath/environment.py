"""Workspace model, point obstacles, obstacle arrangements, collision queries.

Obstacles are dimensionless points; a location collides when it comes within
`clearance` of any obstacle. The default clearance of 10 mm is half the 20 mm
filament width, i.e. the closest the filament centerline may approach an
obstacle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .geometry import ATOL, Point2, Segment, densify
from .seeding import make_rng

DEFAULT_CLEARANCE = 10.0
DEFAULT_MARGIN = 50.0

ARRANGEMENT_KINDS = ("random", "periodic")

# Rejection draws allowed per requested point before giving up.
_DRAW_CAP_FACTOR = 10_000
_DRAW_BATCH = 1024


class WorkspaceSaturatedError(RuntimeError):
    """Raised when rejection sampling cannot place the requested points."""


@dataclass(frozen=True)
class Workspace:
    min_x: float = 0.0
    min_y: float = 0.0
    max_x: float = 800.0
    max_y: float = 800.0

    def __post_init__(self) -> None:
        if not (self.max_x > self.min_x and self.max_y > self.min_y):
            raise ValueError("workspace must have positive extent on both axes")

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y

    def contains(self, p: Point2) -> bool:
        return self.min_x <= p.x <= self.max_x and self.min_y <= p.y <= self.max_y

    def shrunk(self, margin: float) -> "Workspace":
        return Workspace(
            self.min_x + margin, self.min_y + margin, self.max_x - margin, self.max_y - margin
        )

    @property
    def center(self) -> Point2:
        return Point2((self.min_x + self.max_x) / 2.0, (self.min_y + self.max_y) / 2.0)


@dataclass(frozen=True)
class ArrangementSpec:
    kind: str
    count: int
    seed: int = 0
    margin: float = DEFAULT_MARGIN

    def __post_init__(self) -> None:
        if self.kind not in ARRANGEMENT_KINDS:
            raise ValueError(f"arrangement kind must be one of {ARRANGEMENT_KINDS}")
        if self.count < 1:
            raise ValueError("arrangement count must be >= 1")
        if self.margin < 0.0:
            raise ValueError("arrangement margin must be >= 0")


@dataclass(frozen=True)
class Environment:
    """Immutable workspace + obstacle field; safe to share between planners."""

    workspace: Workspace
    obstacles: Tuple[Point2, ...]
    clearance: float = DEFAULT_CLEARANCE
    _points: np.ndarray = field(init=False, repr=False, compare=False)
    _tree: "cKDTree | None" = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.clearance <= 0.0:
            raise ValueError("clearance must be positive")
        obstacles = tuple(Point2(float(p[0]), float(p[1])) for p in self.obstacles)
        object.__setattr__(self, "obstacles", obstacles)
        for p in obstacles:
            if not self.workspace.contains(p):
                raise ValueError(f"obstacle {p} lies outside the workspace")
        points = np.asarray(obstacles, dtype=float).reshape(len(obstacles), 2)
        object.__setattr__(self, "_points", points)
        object.__setattr__(self, "_tree", cKDTree(points) if len(obstacles) else None)

    def min_obstacle_distance(self, p: Point2) -> float:
        if self._tree is None:
            return math.inf
        d, _ = self._tree.query([p.x, p.y])
        return float(d)

    def free_mask(self, points: np.ndarray) -> np.ndarray:
        """Vectorized is_free over an (n, 2) array of coordinates."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        ws = self.workspace
        inside = (
            (pts[:, 0] >= ws.min_x)
            & (pts[:, 0] <= ws.max_x)
            & (pts[:, 1] >= ws.min_y)
            & (pts[:, 1] <= ws.max_y)
        )
        if self._tree is None:
            return inside
        d, _ = self._tree.query(pts)
        return inside & (d > self.clearance)

    def is_free(self, p: Point2) -> bool:
        if not self.workspace.contains(p):
            return False
        return self.min_obstacle_distance(p) > self.clearance

    def segment_free(self, s: Segment, resolution: float) -> bool:
        """True iff every densify sample of s at `resolution` is free."""
        samples = densify(s, resolution)
        return bool(self.free_mask(np.asarray(samples)).all())


def periodic_arrangement(spec: ArrangementSpec, ws: Workspace) -> List[Point2]:
    """Row-major near-square lattice spanning the workspace minus the margin.

    Columns c = ceil(sqrt(count)), rows r = ceil(count / c); the first
    `count` cells are filled. Spacing shrinks as count grows.
    """
    count = spec.count
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    inner = ws if count == 1 else ws.shrunk(spec.margin)
    xs = [ws.center.x] if cols == 1 else list(np.linspace(inner.min_x, inner.max_x, cols))
    ys = [ws.center.y] if rows == 1 else list(np.linspace(inner.min_y, inner.max_y, rows))
    points: List[Point2] = []
    for j in range(rows):
        for i in range(cols):
            if j * cols + i >= count:
                break
            points.append(Point2(float(xs[i]), float(ys[j])))
    return points


def random_arrangement(
    spec: ArrangementSpec,
    ws: Workspace,
    keepout: Sequence[Point2] = (),
    clearance: float = DEFAULT_CLEARANCE,
) -> List[Point2]:
    """Uniform random obstacles inside the workspace shrunk by the margin.

    A draw is rejected when it falls within `clearance` of a keepout vertex
    (so structure vertices stay plannable) or of an already placed obstacle
    (so the nominal obstacle count reflects distinct blocked spots). Raises
    WorkspaceSaturatedError once rejection sampling exceeds 10,000 draws per
    requested point.

    Deterministic for a fixed spec.seed.
    """
    inner = ws.shrunk(spec.margin)
    rng = make_rng(spec.seed)
    cap = _DRAW_CAP_FACTOR * spec.count
    keep = np.asarray(keepout, dtype=float).reshape(len(keepout), 2)
    c2 = clearance * clearance

    accepted: List[Point2] = []
    cell_size = clearance
    cells: dict = {}

    def conflicts(x: float, y: float) -> bool:
        cx = int(x // cell_size)
        cy = int(y // cell_size)
        for nx in (cx - 1, cx, cx + 1):
            for ny in (cy - 1, cy, cy + 1):
                for (ox, oy) in cells.get((nx, ny), ()):
                    ddx = ox - x
                    ddy = oy - y
                    if ddx * ddx + ddy * ddy <= c2:
                        return True
        return False

    def accept(x: float, y: float) -> None:
        accepted.append(Point2(x, y))
        cells.setdefault((int(x // cell_size), int(y // cell_size)), []).append((x, y))

    examined = 0
    low = np.array([inner.min_x, inner.min_y])
    high = np.array([inner.max_x, inner.max_y])
    while len(accepted) < spec.count:
        if examined >= cap:
            raise WorkspaceSaturatedError("workspace saturated")
        batch = rng.uniform(low, high, size=(_DRAW_BATCH, 2))
        ok = np.ones(_DRAW_BATCH, dtype=bool)
        for k in range(len(keep)):
            d2 = (batch[:, 0] - keep[k, 0]) ** 2 + (batch[:, 1] - keep[k, 1]) ** 2
            ok &= d2 > c2
        done_at = _DRAW_BATCH
        for idx in np.flatnonzero(ok):
            x, y = float(batch[idx, 0]), float(batch[idx, 1])
            if not conflicts(x, y):
                accept(x, y)
                if len(accepted) == spec.count:
                    done_at = int(idx) + 1
                    break
        examined += done_at
    return accepted
