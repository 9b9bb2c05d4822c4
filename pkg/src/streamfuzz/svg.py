"""Minimal deterministic SVG line charts (no plotting dependency)."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 40, 50


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 12))
        t += step
    if ticks[-1] < hi:
        ticks.append(round(t, 12))
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _label(v: float) -> str:
    return f"{v:.6g}"


def line_chart(title: str, x: list[float], series: dict[str, list[float | None]], xlabel: str = "",
               ylabel: str = "") -> str:
    """Render series sharing the x values; ``None`` or NaN values leave a gap in the line."""
    values = [v for ys in series.values() for v in ys if v is not None and not math.isnan(v)]
    ylo, yhi = (min(values), max(values)) if values else (0.0, 1.0)
    yticks = _nice_ticks(min(ylo, 0.0) if ylo >= 0 else ylo, yhi)
    xticks = list(x)
    xlo, xhi = (min(x), max(x)) if x else (0.0, 1.0)
    if xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1
    ylo, yhi = yticks[0], yticks[-1]
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(v):
        return LEFT + (v - xlo) / (xhi - xlo) * pw

    def py(v):
        return TOP + ph - (v - ylo) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.2f}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    for t in yticks:
        y = _fmt(py(t))
        out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#e0e0e0"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">{_label(t)}</text>')
    for t in xticks:
        xp = _fmt(px(t))
        out.append(f'<line x1="{xp}" y1="{TOP + ph}" x2="{xp}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{xp}" y="{TOP + ph + 18}" text-anchor="middle">{_label(t)}</text>')
    out.append(f'<polyline points="{LEFT},{TOP} {LEFT},{TOP + ph} {LEFT + pw},{TOP + ph}" '
               f'fill="none" stroke="black"/>')
    if xlabel:
        out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{escape(ylabel)}</text>')

    for s, (name, ys) in enumerate(series.items()):
        color = PALETTE[s % len(PALETTE)]
        segment: list[str] = []
        segments = [segment]
        for xv, yv in zip(x, ys):
            if yv is None or math.isnan(yv):
                segment = []
                segments.append(segment)
                continue
            segment.append(f"{_fmt(px(xv))},{_fmt(py(yv))}")
            out.append(f'<circle cx="{_fmt(px(xv))}" cy="{_fmt(py(yv))}" r="3" fill="{color}"/>')
        for seg in segments:
            if len(seg) > 1:
                out.append(f'<polyline points="{" ".join(seg)}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = TOP + 10 + 18 * s
        lx = LEFT + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
