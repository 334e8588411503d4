"""Minimal static SVG 1.1 line charts (no plotting library)."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 480
MARGIN = dict(left=70, right=150, top=40, bottom=55)
COLORS = {"S": "#1f77b4", "I": "#d62728", "R": "#2ca02c"}
EXTRA_COLORS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        ticks.append(round(start + k * step, 10))
        k += 1
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:g}"


def line_chart(
    times: Sequence[float],
    series: dict[str, Sequence[float]],
    title: str = "",
    overlays: dict[str, Sequence[float]] | None = None,
    x_label: str = "t (days)",
    y_label: str = "individuals",
) -> str:
    """Render ``series`` (solid) and ``overlays`` (dashed) against ``times``.

    Output depends only on the inputs, so identical data gives identical
    bytes.
    """
    overlays = overlays or {}
    t = np.asarray(times, dtype=float)
    all_y = np.concatenate([np.asarray(v, dtype=float) for v in [*series.values(), *overlays.values()]])
    y_lo = min(0.0, float(np.min(all_y)))
    y_hi = float(np.max(all_y))
    x_ticks = nice_ticks(float(t[0]), float(t[-1]))
    y_ticks = nice_ticks(y_lo, y_hi)
    x0, x1 = x_ticks[0], max(x_ticks[-1], float(t[-1]))
    y0, y1 = y_ticks[0], max(y_ticks[-1], y_hi)

    left, top = MARGIN["left"], MARGIN["top"]
    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return left + (x - x0) / (x1 - x0) * plot_w

    def py(y):
        return top + plot_h - (y - y0) / (y1 - y0) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - MARGIN["right"] / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{escape(title)}</text>',
    ]
    # axes and ticks
    out.append(
        f'<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>'
    )
    for xv in x_ticks:
        x = px(xv)
        out.append(f'<line x1="{_fmt(x)}" y1="{top + plot_h}" x2="{_fmt(x)}" y2="{top + plot_h + 5}" stroke="black"/>')
        out.append(
            f'<text x="{_fmt(x)}" y="{top + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_tick_label(xv)}</text>'
        )
    for yv in y_ticks:
        y = py(yv)
        out.append(f'<line x1="{left - 5}" y1="{_fmt(y)}" x2="{left}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(
            f'<text x="{left - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_tick_label(yv)}</text>'
        )
    out.append(
        f'<text x="{left + plot_w / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="16" y="{top + plot_h / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12" transform="rotate(-90 16 {top + plot_h / 2:.0f})">{escape(y_label)}</text>'
    )

    legend = []
    extra = iter(EXTRA_COLORS)
    for dashed, group in ((False, series), (True, overlays)):
        for name, values in group.items():
            color = COLORS.get(name.split()[0], None) or next(extra, "black")
            pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(t, values))
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>')
            legend.append((name, color, dash))

    lx = left + plot_w + 15
    for k, (name, color, dash) in enumerate(legend):
        ly = top + 15 + 20 * k
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(
            f'<text x="{lx + 30}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
