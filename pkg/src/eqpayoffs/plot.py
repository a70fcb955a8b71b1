"""Static SVG 1.1 plots of planar payoff sets.

Polytopes are drawn as outlines, rectangle unions as filled boxes and
points as markers, with a legend.  Coordinates are rounded to three
decimals so reruns give byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

from eqpayoffs.core import GameError, Point, Polytope, RectangleUnion
from eqpayoffs.geometry import hull_2d

WIDTH, HEIGHT, MARGIN, LEGEND = 480, 480, 40, 150
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class Layer:
    label: str
    shape: Polytope | RectangleUnion | tuple[Point, ...]


def _coords(shape) -> list[Point]:
    if isinstance(shape, Polytope):
        return list(shape.vertices)
    if isinstance(shape, RectangleUnion):
        return shape.corners()
    return list(shape)


def _num(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(layers: Sequence[Layer], title: str = "") -> str:
    pts = [p for layer in layers for p in _coords(layer.shape)]
    if not pts:
        raise GameError("nothing to plot")
    if any(len(p) != 2 for p in pts):
        raise GameError("only two-dimensional payoff sets can be plotted")
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, Fraction(1))
    pad = span / 10
    x0, y0 = x0 - pad, y0 - pad
    span += 2 * pad
    inner = WIDTH - 2 * MARGIN

    def sx(v: Fraction) -> str:
        return _num(MARGIN + float((v - x0) / span) * inner)

    def sy(v: Fraction) -> str:
        return _num(HEIGHT - MARGIN - float((v - y0) / span) * inner)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH + LEGEND}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH + LEGEND} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH + LEGEND}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="none" '
        'stroke="#999" stroke-width="1"/>',
    ]
    for v, anchor in ((x0, "start"), (x0 + span, "end")):
        out.append(f'<text x="{sx(v)}" y="{HEIGHT - MARGIN + 16}" font-size="11" '
                   f'text-anchor="{anchor}">{_num(float(v))}</text>')
    for v in (y0, y0 + span):
        out.append(f'<text x="{MARGIN - 4}" y="{sy(v)}" font-size="11" '
                   f'text-anchor="end">{_num(float(v))}</text>')
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 12}" font-size="13">{escape(title)}</text>')
    for k, layer in enumerate(layers):
        color = COLORS[k % len(COLORS)]
        shape = layer.shape
        if isinstance(shape, RectangleUnion):
            for a, b, c, d in sorted(shape.rectangles):
                w = _num(float((b - a) / span) * inner)
                h = _num(float((d - c) / span) * inner)
                out.append(f'<rect x="{sx(a)}" y="{sy(d)}" width="{w}" height="{h}" '
                           f'fill="{color}" fill-opacity="0.35" stroke="{color}" stroke-width="1"/>')
        elif isinstance(shape, Polytope) and len(shape.vertices) > 1:
            ring = hull_2d(shape.vertices)
            path = " ".join(f"{sx(x)},{sy(y)}" for x, y in ring)
            out.append(f'<polygon points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            for x, y in sorted(_coords(shape)):
                out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="4" fill="{color}"/>')
        ly = MARGIN + 18 * k
        out.append(f'<rect x="{WIDTH + 4}" y="{ly}" width="12" height="12" fill="{color}"/>')
        out.append(f'<text x="{WIDTH + 22}" y="{ly + 10}" font-size="12">'
                   f'{escape(layer.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
