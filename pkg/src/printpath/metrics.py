"""The six per-leg path quality metrics and their toolpath aggregation.

Every metric is evaluated against the leg's chord: the straight segment
between the structure vertices the leg connects. Legs must be normalized
(no zero-length segments) before scoring.

Roughness averages |heading change| between consecutive segments. The
absolute value matters: a signed mean cancels on symmetric zigzags and would
score visibly rough paths as nearly straight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable, List, Sequence, Tuple

from .geometry import Point2, Segment, heading, point_segment_distance, turn_angle
from .pgf import Toolpath

# Heading changes below this many degrees do not count as a turn.
TURN_TOL_DEG = 1e-6

DEVIATION_SAMPLES = ("midpoint", "endpoint")


@dataclass(frozen=True)
class LegMetrics:
    roughness: float
    num_turns: float
    offset: float
    rmse: float
    path_deviation: float
    run_time: float


@dataclass(frozen=True)
class MetricsReport:
    per_leg: Tuple[LegMetrics, ...]
    aggregate_mean: LegMetrics
    aggregate_total_run_time: float


def _check_leg(leg: Sequence[Point2]) -> None:
    if len(leg) < 2:
        raise ValueError("empty leg")


def _segments(leg: Sequence[Point2]) -> List[Segment]:
    return [Segment(a, b) for a, b in zip(leg, leg[1:])]


def _chord(leg: Sequence[Point2]) -> Segment:
    return Segment(leg[0], leg[-1])


def roughness(leg: Sequence[Point2]) -> float:
    """Mean |heading change| over consecutive segment pairs, in degrees."""
    _check_leg(leg)
    segs = _segments(leg)
    if len(segs) == 1:
        return 0.0
    headings = [heading(s) for s in segs]
    turns = [abs(turn_angle(h0, h1)) for h0, h1 in zip(headings, headings[1:])]
    return sum(turns) / len(turns)


def num_turns(leg: Sequence[Point2], tol: float = TURN_TOL_DEG) -> int:
    """Count of consecutive segment pairs whose heading change exceeds tol."""
    _check_leg(leg)
    segs = _segments(leg)
    headings = [heading(s) for s in segs]
    return sum(
        1 for h0, h1 in zip(headings, headings[1:]) if abs(turn_angle(h0, h1)) > tol
    )


def offset(leg: Sequence[Point2]) -> float:
    """Maximum waypoint deviation from the leg's chord, in mm."""
    _check_leg(leg)
    chord = _chord(leg)
    return max(point_segment_distance(p, chord) for p in leg)


def rmse(leg: Sequence[Point2], sample: str = "midpoint") -> float:
    """Root mean square chord deviation, one sample per segment.

    The ideal path lies on the chord, so each deviation is measured against
    zero. Samples are taken at segment midpoints by default, or at segment
    end waypoints with sample="endpoint".
    """
    _check_leg(leg)
    if sample not in DEVIATION_SAMPLES:
        raise ValueError(f"sample must be one of {DEVIATION_SAMPLES}")
    chord = _chord(leg)
    devs = []
    for s in _segments(leg):
        if sample == "midpoint":
            p = Point2((s.a.x + s.b.x) / 2.0, (s.a.y + s.b.y) / 2.0)
        else:
            p = s.b
        devs.append(point_segment_distance(p, chord))
    return math.sqrt(sum(d * d for d in devs) / len(devs))


def path_deviation(leg: Sequence[Point2]) -> float:
    """Leg length over chord length; 1.0 exactly for a straight leg."""
    _check_leg(leg)
    chord = _chord(leg)
    chord_len = chord.length()
    if chord_len == 0.0:
        raise ValueError("zero-length chord")
    return sum(s.length() for s in _segments(leg)) / chord_len


def leg_metrics(leg: Sequence[Point2], run_time: float, sample: str = "midpoint") -> LegMetrics:
    return LegMetrics(
        roughness=roughness(leg),
        num_turns=float(num_turns(leg)),
        offset=offset(leg),
        rmse=rmse(leg, sample),
        path_deviation=path_deviation(leg),
        run_time=run_time,
    )


def mean_metrics(items: Iterable[LegMetrics]) -> LegMetrics:
    rows = list(items)
    if not rows:
        raise ValueError("cannot average an empty metrics list")
    values = {
        f.name: sum(getattr(m, f.name) for m in rows) / len(rows)
        for f in fields(LegMetrics)
    }
    return LegMetrics(**values)


def assess(toolpath: Toolpath, sample: str = "midpoint") -> MetricsReport:
    """Score every leg and aggregate: component-wise means plus total time."""
    per_leg = tuple(
        leg_metrics(path.waypoints, path.elapsed, sample) for _, path in toolpath.legs
    )
    return MetricsReport(
        per_leg=per_leg,
        aggregate_mean=mean_metrics(per_leg),
        aggregate_total_run_time=sum(m.run_time for m in per_leg),
    )
