"""Minimal deterministic SVG line plots."""

from __future__ import annotations

import math
from html import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def line_plot(series: dict[str, list[tuple[float, float]]], xlabel: str, ylabel: str,
              title: str = "", markers: dict[str, list[tuple[float, float]]] | None = None) -> str:
    """One polyline per entry of ``series``; ``markers`` are drawn as dots only."""
    markers = markers or {}
    pts = [p for s in list(series.values()) + list(markers.values()) for p in s]
    pts = [p for p in pts if math.isfinite(p[0]) and math.isfinite(p[1])]
    if not pts:
        raise ValueError("nothing to plot")
    xlo, xhi = min(p[0] for p in pts), max(p[0] for p in pts)
    ylo, yhi = min(p[1] for p in pts), max(p[1] for p in pts)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - xlo) / (xhi - xlo) * pw

    def sy(y):
        return MARGIN_T + (1 - (y - ylo) / (yhi - ylo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(xlo, xhi):
        x = sx(t)
        out.append(f'<line x1="{x:.2f}" y1="{MARGIN_T + ph}" x2="{x:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{MARGIN_T + ph + 18}" font-size="11" text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(ylo, yhi):
        y = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.2f}" x2="{MARGIN_L}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.2f}" font-size="11" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 10}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="15" y="{MARGIN_T + ph / 2:.2f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 15 {MARGIN_T + ph / 2:.2f})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="18" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
    names = list(series) + [k for k in markers if k not in series]
    for i, name in enumerate(names):
        color = COLORS[i % len(COLORS)]
        if name in series:
            data = sorted(p for p in series[name] if math.isfinite(p[1]))
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in data)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        for x, y in markers.get(name, series.get(name, [])):
            if math.isfinite(y):
                out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="{color}"/>')
        ly = MARGIN_T + 14 + 16 * i
        lx = MARGIN_L + pw + 10
        out.append(f'<rect x="{lx}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{lx + 15}" y="{ly + 1}" font-size="11">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
