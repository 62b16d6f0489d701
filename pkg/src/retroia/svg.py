"""Self-contained SVG plot of a DoF region polygon."""

from __future__ import annotations

import math
from xml.sax.saxutils import quoteattr

from .regions import DofRegion, format_fraction

WIDTH = 360
HEIGHT = 360
MARGIN = 40


def region_svg(region: DofRegion, title: str = "") -> str:
    """Render ``region`` with integer axis ticks.

    The exact vertex list is embedded in the polygon's ``data-vertices``
    attribute as ``"p/q,p/q;..."``.
    """
    verts = region.vertices
    span = max([1] + [math.ceil(float(c)) for v in verts for c in (v.d1, v.d2)])
    scale = (WIDTH - 2 * MARGIN) / span

    def px(d1, d2):
        return MARGIN + float(d1) * scale, HEIGHT - MARGIN - float(d2) * scale

    exact = ";".join(f"{format_fraction(v.d1)},{format_fraction(v.d2)}" for v in verts)
    points = " ".join("%.6f,%.6f" % px(v.d1, v.d2) for v in verts)
    x0, y0 = px(0, 0)
    x_end, _ = px(span, 0)
    _, y_end = px(0, span)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">']
    if title:
        out.append(f'<title>{title}</title>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x_end}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y_end}" stroke="black"/>')
    for k in range(span + 1):
        xt, _ = px(k, 0)
        _, yt = px(0, k)
        out.append(f'<line x1="{xt:.6f}" y1="{y0}" x2="{xt:.6f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{xt:.6f}" y="{y0 + 18}" font-size="11" '
                   f'text-anchor="middle">{k}</text>')
        out.append(f'<line x1="{x0 - 5}" y1="{yt:.6f}" x2="{x0}" y2="{yt:.6f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 9}" y="{yt + 4:.6f}" font-size="11" '
                   f'text-anchor="end">{k}</text>')
    out.append(f'<text x="{x_end}" y="{y0 + 32}" font-size="12" text-anchor="end">d1</text>')
    out.append(f'<text x="{x0 - 28}" y="{y_end}" font-size="12">d2</text>')
    out.append(f'<polygon class="dof-region" points="{points}" fill="#9ecae1" '
               f'fill-opacity="0.6" stroke="#08519c" data-vertices={quoteattr(exact)}/>')
    for v in verts:
        cx, cy = px(v.d1, v.d2)
        label = f"({format_fraction(v.d1)}, {format_fraction(v.d2)})"
        out.append(f'<circle cx="{cx:.6f}" cy="{cy:.6f}" r="3" fill="#08519c">'
                   f'<title>{label}</title></circle>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
