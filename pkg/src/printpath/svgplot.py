"""Plain-text SVG emission for scenes and result charts.

No plotting dependency: files are built from f-strings with fixed float
formatting, so identical inputs always produce identical bytes and tests can
diff them. Scene figures draw exactly one <path> element per toolpath leg
and one obstacle marker (a circle of radius = clearance) per obstacle.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Sequence, Tuple

from .environment import Environment
from .geometry import Point2
from .pgf import StructureSpec

LEG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf")
SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def scene_svg(
    env: Environment,
    structure: Optional[StructureSpec] = None,
    legs: Sequence[Sequence[Point2]] = (),
    title: str = "",
    size: float = 640.0,
) -> str:
    """Workspace, obstacles, structure vertices, and planned legs."""
    ws = env.workspace
    pad = 0.05 * max(ws.width, ws.height)
    scale = size / max(ws.width + 2 * pad, ws.height + 2 * pad)
    width = (ws.width + 2 * pad) * scale
    height = (ws.height + 2 * pad) * scale

    def sx(x: float) -> float:
        return (x - ws.min_x + pad) * scale

    def sy(y: float) -> float:
        return height - (y - ws.min_y + pad) * scale

    parts: List[str] = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    if title:
        parts.append(f'<title>{title}</title>')
    parts.append(
        f'<rect class="workspace" x="{_fmt(sx(ws.min_x))}" y="{_fmt(sy(ws.max_y))}" '
        f'width="{_fmt(ws.width * scale)}" height="{_fmt(ws.height * scale)}" '
        'fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for p in env.obstacles:
        parts.append(
            f'<circle class="obstacle" cx="{_fmt(sx(p.x))}" cy="{_fmt(sy(p.y))}" '
            f'r="{_fmt(env.clearance * scale)}" fill="#bbbbbb" stroke="#555555" '
            'stroke-width="0.5"/>'
        )
    for li, leg in enumerate(legs):
        d = "M " + " L ".join(f"{_fmt(sx(p.x))} {_fmt(sy(p.y))}" for p in leg)
        color = LEG_COLORS[li % len(LEG_COLORS)]
        parts.append(
            f'<path class="leg" d="{d}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
    if structure is not None:
        for v in structure.vertices:
            parts.append(
                f'<rect class="vertex" x="{_fmt(sx(v.x) - 4)}" y="{_fmt(sy(v.y) - 4)}" '
                'width="8.000" height="8.000" fill="#000000"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _axes(
    width: float,
    height: float,
    margin: float,
    x_range: Tuple[float, float],
    y_range: Tuple[float, float],
    xlabel: str,
    ylabel: str,
    title: str,
) -> Tuple[List[str], "_Projector"]:
    proj = _Projector(width, height, margin, x_range, y_range)
    parts = [
        f'<rect x="{_fmt(margin)}" y="{_fmt(margin)}" width="{_fmt(width - 2 * margin)}" '
        f'height="{_fmt(height - 2 * margin)}" fill="none" stroke="#333333" stroke-width="1"/>',
        f'<text x="{_fmt(width / 2)}" y="{_fmt(height - 8)}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>',
        f'<text x="12" y="{_fmt(height / 2)}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 12 {_fmt(height / 2)})">{ylabel}</text>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="{_fmt(margin - 8)}" text-anchor="middle" '
            f'font-size="13">{title}</text>'
        )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        xv = x_range[0] + frac * (x_range[1] - x_range[0])
        yv = y_range[0] + frac * (y_range[1] - y_range[0])
        px = proj.x(xv)
        py = proj.y(yv)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(height - margin)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(height - margin + 4)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(height - margin + 16)}" text-anchor="middle" '
            f'font-size="10">{xv:g}</text>'
        )
        parts.append(
            f'<line x1="{_fmt(margin - 4)}" y1="{_fmt(py)}" x2="{_fmt(margin)}" '
            f'y2="{_fmt(py)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(margin - 6)}" y="{_fmt(py + 3)}" text-anchor="end" '
            f'font-size="10">{yv:g}</text>'
        )
    return parts, proj


class _Projector:
    def __init__(self, width, height, margin, x_range, y_range):
        self.margin = margin
        self.inner_w = width - 2 * margin
        self.inner_h = height - 2 * margin
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        self.height = height

    def x(self, v: float) -> float:
        span = self.x1 - self.x0
        frac = 0.5 if span == 0 else (v - self.x0) / span
        return self.margin + frac * self.inner_w

    def y(self, v: float) -> float:
        span = self.y1 - self.y0
        frac = 0.5 if span == 0 else (v - self.y0) / span
        return self.height - self.margin - frac * self.inner_h


def curves_svg(
    x_values: Sequence[float],
    series: Dict[str, Sequence[Optional[float]]],
    xlabel: str,
    ylabel: str,
    title: str = "",
    y_range: Optional[Tuple[float, float]] = None,
    width: float = 560.0,
    height: float = 400.0,
) -> str:
    """A line chart; one polyline per series, gaps where values are None."""
    margin = 56.0
    finite = [v for ys in series.values() for v in ys if v is not None]
    if y_range is None:
        lo = min(finite) if finite else 0.0
        hi = max(finite) if finite else 1.0
        if lo == hi:
            lo -= 0.5
            hi += 0.5
        y_range = (min(0.0, lo), hi)
    x_range = (min(x_values), max(x_values)) if x_values else (0.0, 1.0)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
    ]
    axes, proj = _axes(width, height, margin, x_range, y_range, xlabel, ylabel, title)
    parts.extend(axes)
    for si, (name, ys) in enumerate(series.items()):
        color = SERIES_COLORS[si % len(SERIES_COLORS)]
        run: List[str] = []
        for xv, yv in zip(x_values, ys):
            if yv is None:
                if len(run) >= 2:
                    parts.append(
                        f'<polyline class="series" points="{" ".join(run)}" fill="none" '
                        f'stroke="{color}" stroke-width="2"/>'
                    )
                run = []
                continue
            run.append(f"{_fmt(proj.x(xv))},{_fmt(proj.y(yv))}")
        if len(run) >= 2:
            parts.append(
                f'<polyline class="series" points="{" ".join(run)}" fill="none" '
                f'stroke="{color}" stroke-width="2"/>'
            )
        for xv, yv in zip(x_values, ys):
            if yv is not None:
                parts.append(
                    f'<circle cx="{_fmt(proj.x(xv))}" cy="{_fmt(proj.y(yv))}" r="3.000" '
                    f'fill="{color}"/>'
                )
        ly = margin + 14 + 14 * si
        parts.append(
            f'<line x1="{_fmt(width - margin - 86)}" y1="{_fmt(ly - 4)}" '
            f'x2="{_fmt(width - margin - 66)}" y2="{_fmt(ly - 4)}" stroke="{color}" '
            'stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_fmt(width - margin - 60)}" y="{_fmt(ly)}" font-size="11">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bars_svg(
    metric_names: Sequence[str],
    groups: Dict[str, Sequence[Optional[float]]],
    title: str = "",
    width: float = 640.0,
    height: float = 400.0,
) -> str:
    """Grouped bars, one group per metric, normalized by each metric's max
    over the groups so planners are comparable metric by metric."""
    margin = 48.0
    inner_w = width - 2 * margin
    inner_h = height - 2 * margin
    n_metrics = len(metric_names)
    n_groups = max(len(groups), 1)
    slot = inner_w / max(n_metrics, 1)
    bar_w = 0.8 * slot / n_groups
    maxima = []
    for mi in range(n_metrics):
        vals = [vs[mi] for vs in groups.values() if vs[mi] is not None]
        maxima.append(max(vals) if vals else 0.0)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        f'<line x1="{_fmt(margin)}" y1="{_fmt(height - margin)}" x2="{_fmt(width - margin)}" '
        f'y2="{_fmt(height - margin)}" stroke="#333333" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="{_fmt(margin - 12)}" text-anchor="middle" '
            f'font-size="13">{title}</text>'
        )
    for gi, (name, values) in enumerate(groups.items()):
        color = SERIES_COLORS[gi % len(SERIES_COLORS)]
        for mi, value in enumerate(values):
            if value is None or maxima[mi] == 0.0:
                continue
            h = inner_h * value / maxima[mi]
            x = margin + mi * slot + 0.1 * slot + gi * bar_w
            y = height - margin - h
            parts.append(
                f'<rect class="bar" x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(bar_w)}" '
                f'height="{_fmt(h)}" fill="{color}"/>'
            )
        ly = margin + 14 * gi
        parts.append(
            f'<rect x="{_fmt(width - margin - 90)}" y="{_fmt(ly - 9)}" width="10.000" '
            f'height="10.000" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{_fmt(width - margin - 76)}" y="{_fmt(ly)}" font-size="11">{name}</text>'
        )
    for mi, name in enumerate(metric_names):
        cx = margin + mi * slot + slot / 2
        parts.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(height - margin + 16)}" text-anchor="middle" '
            f'font-size="10">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
