"""Minimal deterministic SVG line plots (oscillogram, phase portrait, overlay)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from fracduffing.model import Trajectory

__all__ = ["Series", "nice_ticks", "line_plot_svg", "plot_svg"]

WIDTH, HEIGHT = 800, 600
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 30, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")


@dataclass(frozen=True)
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    dashed: bool = False


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v = start + len(ticks) * step
    return ticks


def _tick_label(v: float) -> str:
    return format(v, ".6g")


def _bounds(values: Sequence[np.ndarray]) -> tuple[float, float]:
    lo = min(float(np.min(v)) for v in values)
    hi = max(float(np.max(v)) for v in values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    pad = 0.04 * (hi - lo)
    return lo - pad, hi + pad


def line_plot_svg(series: Sequence[Series], title: str, xlabel: str, ylabel: str) -> str:
    if not series or any(len(s.x) == 0 for s in series):
        raise ValueError("nothing to plot")
    x0, x1 = _bounds([s.x for s in series])
    y0, y1 = _bounds([s.y for s in series])
    pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(v):
        return MARGIN_LEFT + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_TOP + (y1 - v) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{escape(title)}</text>',
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for v in nice_ticks(x0, x1):
        px = sx(v)
        out.append(
            f'<line x1="{px:.2f}" y1="{MARGIN_TOP + ph}" x2="{px:.2f}" y2="{MARGIN_TOP + ph + 5}" '
            'stroke="black"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{MARGIN_TOP + ph + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_tick_label(v)}</text>'
        )
    for v in nice_ticks(y0, y1):
        py = sy(v)
        out.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{py:.2f}" x2="{MARGIN_LEFT}" y2="{py:.2f}" '
            'stroke="black"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{_tick_label(v)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(xlabel)}</text>'
    )
    out.append(
        f'<text x="20" y="{MARGIN_TOP + ph / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 20 {MARGIN_TOP + ph / 2:.1f})">{escape(ylabel)}</text>'
    )

    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(s.x, s.y))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{pts}"/>'
        )
        ly = MARGIN_TOP + 18 + 18 * i
        lx = MARGIN_LEFT + pw - 150
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="{color}" '
            f'stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{lx + 36}" y="{ly + 4}" font-family="sans-serif" font-size="12">'
            f"{escape(s.label)}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_svg(trajectories: Sequence[Trajectory], kind: str, exact=None) -> str:
    """Render ``kind`` in {"oscillogram", "phase", "overlay"}.

    ``overlay`` draws ``x(t)`` for every trajectory plus ``exact(t)`` when
    given; ``phase`` draws ``y`` against ``x``.
    """
    if not trajectories:
        raise ValueError("no trajectories to plot")
    if kind == "phase":
        series = [Series(tr.scheme, tr.x, tr.y) for tr in trajectories]
        return line_plot_svg(series, "Phase trajectory", "x", "y")
    if kind in ("oscillogram", "overlay"):
        series = [Series(tr.scheme, tr.t, tr.x) for tr in trajectories]
        if kind == "overlay" and exact is not None:
            t = trajectories[0].t
            series.append(Series("exact", t, np.asarray(exact(t), dtype=float), dashed=True))
        return line_plot_svg(series, "Oscillogram" if kind == "oscillogram" else "Solutions", "t", "x")
    raise ValueError(f"unknown plot kind {kind!r}")
