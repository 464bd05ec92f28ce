"""Deterministic SVG 1.1 rendering of lattice shapes and eigenfunctions."""

from __future__ import annotations

from typing import Mapping, Sequence

from .grid import Subgraph, boundary

CELL = 24  # pixels per lattice unit
FULL = (33, 102, 172)  # colour at the eigenfunction maximum
PLAIN = (120, 120, 120)
GAP = 1  # lattice units between panels


def _hex(rgb) -> str:
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in rgb)


def heat(value: float, lo: float, hi: float) -> str:
    """Linear ramp from white at ``lo`` to FULL at ``hi``; a flat range maps to FULL."""
    t = 1.0 if hi <= lo else (value - lo) / (hi - lo)
    t = min(max(t, 0.0), 1.0)
    return _hex(tuple(255 + t * (c - 255) for c in FULL))


def _panel(g: Subgraph, values: Mapping | None, title: str | None, ox: int, top: int, bottom: int):
    """SVG elements for one panel whose lattice-x origin sits at pixel ``ox``."""
    x0 = g.bbox[0] - 1
    parts = []
    if title:
        parts.append(
            f'<text x="{ox}" y="14" font-family="monospace" font-size="12">{_escape(title)}</text>'
        )

    def px(c):
        return ox + (c.x - x0) * CELL, 20 + (top - c.y) * CELL

    lo = hi = None
    if values:
        vs = [values[c] for c in g if c in values]
        lo, hi = min(vs), max(vs)
    for c in sorted(boundary(g), key=lambda c: (c.y, c.x)):
        x, y = px(c)
        parts.append(
            f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="none" '
            f'stroke="#bbbbbb" stroke-dasharray="3,2"/>'
        )
    for c in g:
        x, y = px(c)
        fill = heat(values[c], lo, hi) if values else _hex(PLAIN)
        parts.append(
            f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#000000"/>'
        )
    return parts


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_svg(g: Subgraph, values: Mapping | None = None, title: str | None = None) -> str:
    return render_panels([(g, values, title)])


def render_panels(panels: Sequence[tuple]) -> str:
    """Side-by-side panels ``(shape, values or None, title or None)`` sharing one y scale."""
    top = max(p[0].bbox[3] for p in panels) + 1
    bottom = min(p[0].bbox[2] for p in panels) - 1
    body = []
    ox = 0
    for g, values, title in panels:
        body.extend(_panel(g, values, title, ox + 4, top, bottom))
        ox += (g.width + 2 + GAP) * CELL
    width = ox - GAP * CELL + 8
    height = 20 + (top - bottom + 1) * CELL + 4
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="#ffffff"/>', *body, "</svg>"]) + "\n"
