"""Minimal log-log line plots written as standalone SVG."""

import math
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _decades(lo, hi):
    return [10.0**e for e in range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)]


def loglog(series, title="", xlabel="t", ylabel="", ref_slope=None, width=640, height=420):
    """series: list of (x, y, label); nonpositive points are dropped.

    ref_slope draws a dashed line x^ref_slope through the middle point of the
    first series.
    """
    pts = []
    for x, y, label in series:
        xy = [(float(a), float(b)) for a, b in zip(x, y) if a > 0 and b > 0]
        pts.append((xy, label))
    allp = [p for xy, _ in pts for p in xy]
    if not allp:
        raise ValueError("nothing to plot: no positive samples")
    lx = [math.log10(p[0]) for p in allp]
    ly = [math.log10(p[1]) for p in allp]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    ml, mr, mt, mb = 70, 20, 36, 50
    W, H = width - ml - mr, height - mt - mb

    def X(v):
        return ml + (math.log10(v) - x0) / (x1 - x0) * W

    def Y(v):
        return mt + (1 - (math.log10(v) - y0) / (y1 - y0)) * H

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="{ml}" y="{mt}" width="{W}" height="{H}" fill="white" stroke="black"/>']
    for d in _decades(10**x0, 10**x1):
        if x0 <= math.log10(d) <= x1:
            out.append(f'<line x1="{X(d):.2f}" y1="{mt}" x2="{X(d):.2f}" y2="{mt + H}" stroke="#ddd"/>')
            out.append(f'<text x="{X(d):.2f}" y="{mt + H + 16}" text-anchor="middle">{d:g}</text>')
    for d in _decades(10**y0, 10**y1):
        if y0 <= math.log10(d) <= y1:
            out.append(f'<line x1="{ml}" y1="{Y(d):.2f}" x2="{ml + W}" y2="{Y(d):.2f}" stroke="#ddd"/>')
            out.append(f'<text x="{ml - 6}" y="{Y(d) + 4:.2f}" text-anchor="end">{d:.0e}</text>')
    for i, (xy, label) in enumerate(pts):
        if len(xy) < 2:
            continue
        c = COLORS[i % len(COLORS)]
        path = " ".join(f"{X(a):.2f},{Y(b):.2f}" for a, b in xy)
        out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{ml + W - 8}" y="{mt + 16 + 16 * i}" text-anchor="end" fill="{c}">{escape(label)}</text>')
    if ref_slope is not None and pts and pts[0][0]:
        xy = pts[0][0]
        xm, ym = xy[len(xy) // 2]
        xa, xb = 10**x0, 10**x1
        ya, yb = ym * (xa / xm) ** ref_slope, ym * (xb / xm) ** ref_slope
        out.append(f'<line x1="{X(xa):.2f}" y1="{Y(ya):.2f}" x2="{X(xb):.2f}" y2="{Y(yb):.2f}" '
                   f'stroke="black" stroke-dasharray="6,4" clip-path="url(#plot)"/>')
        out.append(f'<text x="{ml + 8}" y="{mt + H - 8}">reference slope {ref_slope:g}</text>')
        out.insert(1, f'<defs><clipPath id="plot"><rect x="{ml}" y="{mt}" width="{W}" height="{H}"/></clipPath></defs>')
    out.append(f'<text x="{ml + W / 2}" y="{height - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{mt + H / 2}" transform="rotate(-90 16 {mt + H / 2})" '
               f'text-anchor="middle">{escape(ylabel)}</text>')
    out.append(f'<text x="{ml + W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
