"""Deterministic SVG scatter plots of fronts in criterion space.

Fixed 800x600 canvas, linear axes auto-scaled to the data with a 5% margin,
one marker shape per method. No timestamps or generated ids, so byte-identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

from .pareto import Front

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 30, 40, 60

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_MARKERS = ("circle", "square", "triangle", "diamond", "cross")


def _nice_step(span: float) -> float:
    raw = span / 5.0
    power = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0):
        if raw <= mult * power:
            return mult * power
    return 10.0 * power


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    value = first
    while value <= hi + 1e-12 * max(1.0, abs(hi)):
        ticks.append(0.0 if abs(value) < step * 1e-9 else value)
        value += step
    return ticks


def _data_range(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = max(0.5, abs(lo) * 0.05)
    else:
        pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _marker(shape: str, cx: float, cy: float, color: str) -> str:
    r = 5.0
    if shape == "circle":
        return f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.1f}" fill="{color}"/>'
    if shape == "square":
        return (
            f'<rect x="{cx - r:.2f}" y="{cy - r:.2f}" width="{2 * r:.1f}" '
            f'height="{2 * r:.1f}" fill="{color}"/>'
        )
    if shape == "triangle":
        pts = f"{cx:.2f},{cy - r:.2f} {cx - r:.2f},{cy + r:.2f} {cx + r:.2f},{cy + r:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "diamond":
        pts = f"{cx:.2f},{cy - r:.2f} {cx + r:.2f},{cy:.2f} {cx:.2f},{cy + r:.2f} {cx - r:.2f},{cy:.2f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    return (
        f'<path d="M {cx - r:.2f} {cy - r:.2f} L {cx + r:.2f} {cy + r:.2f} '
        f'M {cx - r:.2f} {cy + r:.2f} L {cx + r:.2f} {cy - r:.2f}" '
        f'stroke="{color}" stroke-width="2.5" fill="none"/>'
    )


def front_svg(front: Front, x_label: str = "Ra (um)", y_label: str = "MRR (mm^3/min)",
              title: str = "") -> str:
    """Render the feasible points of ``front`` as an SVG scatter, grouped by method."""
    points = [p for p in front.points if p.feasible]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{title}</text>'
        )
    if points:
        x_lo, x_hi = _data_range([p.responses[0] for p in points])
        y_lo, y_hi = _data_range([p.responses[1] for p in points])

        def sx(v: float) -> float:
            return MARGIN_LEFT + (v - x_lo) / (x_hi - x_lo) * plot_w

        def sy(v: float) -> float:
            return HEIGHT - MARGIN_BOTTOM - (v - y_lo) / (y_hi - y_lo) * plot_h

        for tick in _ticks(x_lo, x_hi):
            px = sx(tick)
            parts.append(
                f'<line x1="{px:.2f}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{px:.2f}" '
                f'y2="{HEIGHT - MARGIN_BOTTOM + 6}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{px:.2f}" y="{HEIGHT - MARGIN_BOTTOM + 22}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12">{tick:g}</text>'
            )
        for tick in _ticks(y_lo, y_hi):
            py = sy(tick)
            parts.append(
                f'<line x1="{MARGIN_LEFT - 6}" y1="{py:.2f}" x2="{MARGIN_LEFT}" '
                f'y2="{py:.2f}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{MARGIN_LEFT - 10}" y="{py + 4:.2f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="12">{tick:g}</text>'
            )

        methods: list[str] = []
        for p in points:
            if p.method not in methods:
                methods.append(p.method)
        style = {
            m: (_PALETTE[i % len(_PALETTE)], _MARKERS[i % len(_MARKERS)])
            for i, m in enumerate(methods)
        }
        for p in points:
            color, shape = style[p.method]
            parts.append(_marker(shape, sx(p.responses[0]), sy(p.responses[1]), color))
        for i, m in enumerate(methods):
            color, shape = style[m]
            ly = MARGIN_TOP + 14 + 20 * i
            lx = WIDTH - MARGIN_RIGHT - 170
            parts.append(_marker(shape, lx, ly - 4, color))
            parts.append(
                f'<text x="{lx + 12}" y="{ly}" font-family="sans-serif" font-size="12">{m}</text>'
            )

    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>'
    )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2:.0f}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{x_label}</text>'
    )
    parts.append(
        f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.0f})">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_front_svg(path: str | Path, front: Front, **kwargs) -> None:
    Path(path).write_text(front_svg(front, **kwargs), encoding="utf-8")
