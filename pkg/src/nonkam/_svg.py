"""Tiny dependency-free SVG writers for heatmaps and line plots."""
from __future__ import annotations

import math

import numpy as np


def _colour(v, lo, hi):
    t = 0.0 if hi <= lo or not math.isfinite(v) else (v - lo) / (hi - lo)
    t = min(1.0, max(0.0, t))
    # dark blue -> yellow
    r, g, b = int(30 + 225 * t), int(30 + 200 * t), int(120 - 100 * t)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(values, path, cell: int = 2):
    """Rows of ``values`` are drawn top to bottom."""
    values = np.asarray(values, dtype=float)
    rows, cols = values.shape
    lo, hi = float(np.nanmin(values)), float(np.nanmax(values))
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{cols * cell}" '
             f'height="{rows * cell}" shape-rendering="crispEdges">']
    for i in range(rows):
        y = (rows - 1 - i) * cell
        for j in range(cols):
            parts.append(f'<rect x="{j * cell}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="{_colour(values[i, j], lo, hi)}"/>')
    parts.append("</svg>\n")
    _write(path, "\n".join(parts))


def lines(series, path, width: int = 480, height: int = 320, loglog: bool = True):
    """``series`` maps a label to ``(xs, ys)``."""
    tf = (lambda v: math.log10(v)) if loglog else (lambda v: v)
    pts = {k: [(tf(x), tf(y)) for x, y in zip(*xy) if not loglog or (x > 0 and y > 0)]
           for k, xy in series.items()}
    allx = [p[0] for v in pts.values() for p in v] or [0.0, 1.0]
    ally = [p[1] for v in pts.values() for p in v] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    sx = (width - 40) / ((x1 - x0) or 1.0)
    sy = (height - 40) / ((y1 - y0) or 1.0)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">']
    for idx, (label, p) in enumerate(sorted(pts.items())):
        coords = " ".join(f"{20 + (x - x0) * sx:.2f},{height - 20 - (y - y0) * sy:.2f}" for x, y in p)
        colour = palette[idx % len(palette)]
        parts.append(f'<polyline fill="none" stroke="{colour}" points="{coords}"/>')
        parts.append(f'<text x="24" y="{16 + 14 * idx}" fill="{colour}" font-size="11">{label}</text>')
    parts.append("</svg>\n")
    _write(path, "\n".join(parts))


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)
