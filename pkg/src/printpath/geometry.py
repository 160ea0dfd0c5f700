"""Planar geometry primitives shared by the planners and the path metrics.

All coordinates are millimetres, all angles are degrees. Angles are kept in
the half-open interval (-180, 180] so that a straight continuation measures
exactly 0 and a U-turn exactly 180.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple

# Absolute tolerance for coincidence checks, in mm.
ATOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


class Segment(NamedTuple):
    a: Point2
    b: Point2

    def length(self) -> float:
        return math.dist(self.a, self.b)


def normalize_angle(degrees: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    wrapped = math.fmod(degrees, 360.0)
    if wrapped > 180.0:
        wrapped -= 360.0
    elif wrapped <= -180.0:
        wrapped += 360.0
    return wrapped


def heading(s: Segment) -> float:
    """Direction of b - a in degrees, counterclockwise from the +x axis.

    Raises ValueError for segments shorter than ATOL; a heading of a
    (near-)point is meaningless.
    """
    if s.length() < ATOL:
        raise ValueError("degenerate segment")
    return normalize_angle(math.degrees(math.atan2(s.b.y - s.a.y, s.b.x - s.a.x)))


def turn_angle(prev: float, nxt: float) -> float:
    """Signed heading change from `prev` to `nxt`, wrapped into (-180, 180]."""
    return normalize_angle(nxt - prev)


def point_segment_distance(p: Point2, s: Segment) -> float:
    """Euclidean distance from p to the closed segment s.

    A zero-length segment degrades to the distance to its single point.
    """
    ax, ay = s.a
    bx, by = s.b
    dx = bx - ax
    dy = by - ay
    dd = dx * dx + dy * dy
    if dd == 0.0:
        return math.dist(p, s.a)
    t = ((p.x - ax) * dx + (p.y - ay) * dy) / dd
    t = min(1.0, max(0.0, t))
    return math.hypot(p.x - (ax + t * dx), p.y - (ay + t * dy))


def densify(s: Segment, resolution: float) -> List[Point2]:
    """Equally spaced points along s with consecutive spacing <= resolution.

    Returns a = p_0, ..., p_k = b with k = ceil(len(s) / resolution).
    A zero-length segment yields just [a].
    """
    if resolution <= 0.0:
        raise ValueError("resolution must be positive")
    length = s.length()
    if length == 0.0:
        return [s.a]
    k = math.ceil(length / resolution)
    dx = s.b.x - s.a.x
    dy = s.b.y - s.a.y
    points = [s.a]
    for j in range(1, k):
        t = j / k
        points.append(Point2(s.a.x + t * dx, s.a.y + t * dy))
    points.append(s.b)
    return points
