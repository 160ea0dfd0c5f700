"""Matplotlib rendering of report figures to PNG files.

These are the human-friendly companions to the hand-emitted SVGs. Rendering
is pinned to the Agg backend and the PNG metadata is stripped so a replay of
the same data produces identical bytes.
"""

from __future__ import annotations

from typing import Dict, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .environment import Environment
from .geometry import Point2
from .pgf import StructureSpec

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": None}}


def save_scene_png(
    out_path,
    env: Environment,
    structure: Optional[StructureSpec] = None,
    legs: Sequence[Sequence[Point2]] = (),
    title: str = "",
) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    ws = env.workspace
    ax.add_patch(
        plt.Rectangle(
            (ws.min_x, ws.min_y), ws.width, ws.height, fill=False, edgecolor="0.2", lw=1.0
        )
    )
    for p in env.obstacles:
        ax.add_patch(plt.Circle((p.x, p.y), env.clearance, color="0.75", ec="0.4", lw=0.4))
    for li, leg in enumerate(legs):
        xs = [p.x for p in leg]
        ys = [p.y for p in leg]
        ax.plot(xs, ys, lw=1.6, color=f"C{li % 10}", label=f"leg {li}")
    if structure is not None:
        vx = [v.x for v in structure.vertices]
        vy = [v.y for v in structure.vertices]
        ax.plot(vx, vy, "ks", ms=5, ls="none")
    pad = 0.05 * max(ws.width, ws.height)
    ax.set_xlim(ws.min_x - pad, ws.max_x + pad)
    ax.set_ylim(ws.min_y - pad, ws.max_y + pad)
    ax.set_aspect("equal")
    ax.set_xlabel("x (mm)")
    ax.set_ylabel("y (mm)")
    if title:
        ax.set_title(title)
    fig.savefig(out_path, **_SAVE_KWARGS)
    plt.close(fig)


def save_curves_png(
    out_path,
    x_values: Sequence[float],
    panels: Dict[str, Dict[str, Sequence[Optional[float]]]],
    xlabel: str,
    title: str = "",
    log_x: bool = False,
) -> None:
    """One subplot per panel; each panel maps series name -> y values."""
    n = max(len(panels), 1)
    fig, axes = plt.subplots(1, n, figsize=(5.2 * n, 4.0), squeeze=False)
    for ax, (ylabel, series) in zip(axes[0], panels.items()):
        for name, ys in series.items():
            xs = [x for x, y in zip(x_values, ys) if y is not None]
            vs = [y for y in ys if y is not None]
            ax.plot(xs, vs, marker="o", ms=3.5, label=name)
        if log_x:
            ax.set_xscale("log", base=2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_KWARGS)
    plt.close(fig)


def save_bars_png(
    out_path,
    metric_names: Sequence[str],
    groups: Dict[str, Sequence[Optional[float]]],
    title: str = "",
) -> None:
    """Grouped bars normalized by each metric's max across groups."""
    fig, ax = plt.subplots(figsize=(7.2, 4.2))
    n_groups = max(len(groups), 1)
    width = 0.8 / n_groups
    maxima = []
    for mi in range(len(metric_names)):
        vals = [vs[mi] for vs in groups.values() if vs[mi] is not None]
        maxima.append(max(vals) if vals else 0.0)
    for gi, (name, values) in enumerate(groups.items()):
        xs = []
        hs = []
        for mi, value in enumerate(values):
            if value is None or maxima[mi] == 0.0:
                continue
            xs.append(mi + gi * width - 0.4 + width / 2)
            hs.append(value / maxima[mi])
        ax.bar(xs, hs, width=width, label=name, color=f"C{gi % 10}")
    ax.set_xticks(range(len(metric_names)))
    ax.set_xticklabels(metric_names, fontsize=8)
    ax.set_ylabel("relative to max across planners")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(out_path, **_SAVE_KWARGS)
    plt.close(fig)
