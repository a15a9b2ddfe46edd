"""Report emission: per-run CSV, mean +/- std summaries, trajectory SVG.

Everything is written with repr floats and fixed ordering so a campaign
with fixed seeds produces byte-identical files across executions.
"""

import os

import numpy as np


def fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def mean_std(values):
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        return float("nan"), float("nan")
    return float(arr.mean()), float(arr.std())


def summarize(pairs):
    """Lines of 'label: mean +/- std (n=k)' for {label: values} pairs."""
    lines = []
    for label, values in pairs:
        values = list(values)
        m, s = mean_std(values)
        lines.append(f"{label}: {m:.6g} +/- {s:.6g} (n={len(values)})")
    return lines


def write_summary(path, title, lines):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(title + "\n")
        fh.write("=" * len(title) + "\n")
        for line in lines:
            fh.write(line + "\n")


SVG_COLORS = {"RW": "#222222", "SIL": "#1f77b4", "VIL": "#2ca02c", "MR": "#d62728"}


def trajectory_svg(path, scenario, named_trajectories, failures=(), scale=120):
    """Overlay trajectories (name -> [(x, y), ...]) over the scenario.

    Obstacles draw as red rectangles, failure points as filled dots.
    """
    w = scenario.room.width * scale
    h = scenario.room.depth * scale

    def sx(x):
        return x * scale

    def sy(y):
        return h - y * scale  # svg y grows downward

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {w:.0f} {h:.0f}">',
        f'<rect x="0" y="0" width="{w:.0f}" height="{h:.0f}" fill="#f4f4f2"/>',
    ]
    pts, *_ = scenario.track.table
    center = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts)
    parts.append(f'<polygon points="{center}" fill="none" stroke="#bbbbbb" '
                 f'stroke-width="2" stroke-dasharray="6,6"/>')
    for obs in scenario.obstacles:
        ox, oy = sx(obs.pose.x - obs.length / 2), sy(obs.pose.y + obs.width / 2)
        parts.append(f'<rect x="{ox:.1f}" y="{oy:.1f}" width="{obs.length * scale:.1f}" '
                     f'height="{obs.width * scale:.1f}" fill="#d62728" opacity="0.85"/>')
    for name, traj in named_trajectories:
        color = SVG_COLORS.get(name.split("/")[0], "#9467bd")
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in traj[::5])
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="2" opacity="0.8"><title>{name}</title></polyline>')
    for fx, fy in failures:
        parts.append(f'<circle cx="{sx(fx):.1f}" cy="{sy(fy):.1f}" r="7" '
                     f'fill="#d62728" stroke="#7f0000"/>')
    parts.append("</svg>")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
