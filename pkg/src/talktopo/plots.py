"""Standalone SVG figures: diagram scatter plots and image heatmaps.

The files are self-contained XML with no external references. Diagram
plots show birth/death points above the diagonal, with infinite deaths
drawn as upward triangles pinned to the top edge. Image heatmaps map
values linearly from zero (white) to the maximum entry (black), so an
all-zero image renders as a uniform background.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .io import atomic_write_text
from .pimage import PersistenceImage
from .persistence import PersistenceDiagram

_SIZE = 480
_MARGIN = 56
_DIM_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _svg_header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SIZE}" height="{_SIZE}" '
        f'viewBox="0 0 {_SIZE} {_SIZE}">',
        f'<title>{escape(title)}</title>',
        f'<rect x="0" y="0" width="{_SIZE}" height="{_SIZE}" fill="white"/>',
    ]


def _axes(parts: list[str], x_label: str, y_label: str) -> None:
    lo, hi = _MARGIN, _SIZE - _MARGIN
    parts.append(
        f'<line x1="{lo}" y1="{hi}" x2="{hi}" y2="{hi}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{lo}" y1="{hi}" x2="{lo}" y2="{lo}" stroke="black" stroke-width="1"/>'
    )
    mid = (lo + hi) / 2
    parts.append(
        f'<text x="{mid}" y="{_SIZE - 14}" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="16" y="{mid}" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {mid})">{escape(y_label)}</text>'
    )


def _tick_text(parts: list[str], x: float, y: float, value: float, anchor: str) -> None:
    parts.append(
        f'<text x="{x:.1f}" y="{y:.1f}" font-size="11" text-anchor="{anchor}" '
        f'font-family="sans-serif">{value:.3g}</text>'
    )


def plot_diagram_svg(diagram: PersistenceDiagram, out) -> None:
    """Birth/death scatter with the diagonal; one fill color per dimension.

    An empty diagram still gets axes and the diagonal. Points with
    infinite death become triangles at the top edge of the plot area.
    """
    lo, hi = _MARGIN, _SIZE - _MARGIN
    span = hi - lo
    finite = diagram.deaths[np.isfinite(diagram.deaths)]
    values = np.concatenate([diagram.births, finite])
    if len(values) == 0:
        vmin, vmax = 0.0, 1.0
    else:
        vmin = float(values.min())
        vmax = float(values.max())
        if vmax <= vmin:
            vmax = vmin + 1.0
        pad = 0.05 * (vmax - vmin)
        vmin, vmax = vmin - pad, vmax + pad

    def to_x(v: float) -> float:
        return lo + (v - vmin) / (vmax - vmin) * span

    def to_y(v: float) -> float:
        return hi - (v - vmin) / (vmax - vmin) * span

    parts = _svg_header(f"persistence diagram {diagram.source_id}".strip())
    _axes(parts, "birth", "death")
    parts.append(
        f'<line x1="{to_x(vmin)}" y1="{to_y(vmin)}" x2="{to_x(vmax)}" y2="{to_y(vmax)}" '
        'stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>'
    )
    _tick_text(parts, lo, hi + 14, vmin, "middle")
    _tick_text(parts, hi, hi + 14, vmax, "middle")
    _tick_text(parts, lo - 6, hi, vmin, "end")
    _tick_text(parts, lo - 6, lo + 4, vmax, "end")

    seen_dims = sorted({int(q) for q in diagram.dims})
    for q, b, d in zip(diagram.dims, diagram.births, diagram.deaths):
        color = _DIM_COLORS[int(q) % len(_DIM_COLORS)]
        x = to_x(float(b))
        if np.isinf(d):
            y = float(lo)
            parts.append(
                f'<polygon points="{x - 5:.2f},{y + 8:.2f} {x + 5:.2f},{y + 8:.2f} '
                f'{x:.2f},{y - 2:.2f}" fill="{color}"/>'
            )
        else:
            parts.append(
                f'<circle cx="{x:.2f}" cy="{to_y(float(d)):.2f}" r="3.5" '
                f'fill="{color}" fill-opacity="0.8"/>'
            )
    for i, q in enumerate(seen_dims):
        color = _DIM_COLORS[q % len(_DIM_COLORS)]
        y = lo + 16 * i
        parts.append(f'<circle cx="{hi - 58}" cy="{y}" r="4" fill="{color}"/>')
        parts.append(
            f'<text x="{hi - 48}" y="{y + 4}" font-size="12" '
            f'font-family="sans-serif">dim {q}</text>'
        )
    parts.append("</svg>")
    atomic_write_text(out, "\n".join(parts) + "\n")


def plot_piv_svg(image: PersistenceImage, out) -> None:
    """Grayscale heatmap of the image grid, white at zero, black at the
    maximum entry; axes show the birth and persistence ranges."""
    cfg = image.config
    grid = image.grid()
    p = cfg.pixels_per_axis
    top = float(grid.max())
    lo, hi = _MARGIN, _SIZE - _MARGIN
    cell = (hi - lo) / p

    parts = _svg_header("persistence image")
    for i in range(p):  # persistence index, drawn upward
        y = hi - (i + 1) * cell
        for j in range(p):
            shade = 0.0 if top == 0.0 else grid[i, j] / top
            level = int(round(255 * (1.0 - shade)))
            parts.append(
                f'<rect x="{lo + j * cell:.2f}" y="{y:.2f}" width="{cell:.2f}" '
                f'height="{cell:.2f}" fill="rgb({level},{level},{level})"/>'
            )
    _axes(parts, "birth", "persistence")
    _tick_text(parts, lo, hi + 14, cfg.birth_range[0], "middle")
    _tick_text(parts, hi, hi + 14, cfg.birth_range[1], "middle")
    _tick_text(parts, lo - 6, hi, cfg.persistence_range[0], "end")
    _tick_text(parts, lo - 6, lo + 4, cfg.persistence_range[1], "end")
    parts.append("</svg>")
    atomic_write_text(out, "\n".join(parts) + "\n")
