"""Deterministic static SVG charts: multi-line and stacked-area.

Output depends only on the :class:`ChartSpec`; identical specs give identical
bytes.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from html import escape

from interdiv.errors import DataError

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896",
    "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
)
STACK_TOL = 1e-6


@dataclass(frozen=True)
class ChartSeries:
    name: str
    xs: tuple
    ys: tuple  # None marks a gap


@dataclass(frozen=True)
class ChartSpec:
    kind: str  # "line" or "stacked"
    series: tuple
    x_label: str = "Year"
    y_label: str = ""
    title: str = ""
    width: int = 960
    height: int = 540
    palette_seed: int = 0
    extra: dict = field(default_factory=dict)


def palette(n, seed=0):
    colors = list(PALETTE)
    if seed:
        random.Random(seed).shuffle(colors)
    while len(colors) < n:
        colors += colors[: n - len(colors)]
    return colors[:n]


def nice_ticks(lo, hi, target=6):
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        pad = abs(lo) * 0.1 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / max(1, target - 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    k = 0
    while True:
        t = start + k * step
        if t > hi + step * 1e-9:
            break
        ticks.append(round(t, 10))
        k += 1
    if ticks[-1] < hi:
        ticks.append(round(ticks[-1] + step, 10))
    return ticks


def _fmt(v):
    return f"{v:.2f}"


def _label(v):
    return f"{v:g}"


def validate(spec):
    if spec.kind not in ("line", "stacked"):
        raise DataError(f"unknown chart kind {spec.kind!r}")
    if not spec.series or not any(any(y is not None for y in s.ys) for s in spec.series):
        raise DataError("empty series: nothing to plot")
    for s in spec.series:
        if len(s.xs) != len(s.ys):
            raise DataError(f"series {s.name!r}: x and y lengths differ")
        for i, (x, y) in enumerate(zip(s.xs, s.ys)):
            if (y is not None and math.isnan(y)) or math.isnan(x):
                raise DataError(f"NaN in series {s.name!r} at index {i}")
    if spec.kind == "stacked":
        totals = {}
        for s in spec.series:
            for x, y in zip(s.xs, s.ys):
                if y is not None:
                    totals.setdefault(x, []).append(y)
        for x, ys in totals.items():
            if abs(math.fsum(ys) - 1.0) > STACK_TOL:
                raise DataError(f"stacked series do not sum to 1 at x={x}: {math.fsum(ys)!r}")


def render_chart(spec):
    """Return the SVG document for ``spec`` as a string."""
    validate(spec)
    w, h = spec.width, spec.height
    left, right, top = 70, 220, 40
    bottom = 60
    pw, ph = w - left - right, h - top - bottom

    xs_all = sorted({x for s in spec.series for x, y in zip(s.xs, s.ys) if y is not None})
    if spec.kind == "stacked":
        y_ticks = [0, 0.2, 0.4, 0.6, 0.8, 1.0]
    else:
        ys_all = [y for s in spec.series for y in s.ys if y is not None]
        y_ticks = nice_ticks(min(ys_all), max(ys_all))
    x_ticks = nice_ticks(xs_all[0], xs_all[-1], target=8) if xs_all[0] != xs_all[-1] else [xs_all[0]]
    x_lo, x_hi = min(x_ticks[0], xs_all[0]), max(x_ticks[-1], xs_all[-1])
    y_lo, y_hi = y_ticks[0], y_ticks[-1]

    def sx(x):
        return left + (pw / 2 if x_hi == x_lo else (x - x_lo) / (x_hi - x_lo) * pw)

    def sy(y):
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    colors = palette(len(spec.series), spec.palette_seed)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
    ]
    out.extend(f"<!-- {escape(line, quote=False).replace('--', '- -')} -->" for line in spec.extra.get("comments", ()))
    out.append(f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>')
    if spec.title:
        out.append(f'<text x="{_fmt(w / 2)}" y="24" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="16">{escape(spec.title)}</text>')

    out.append('<g class="axes" stroke="#333333" stroke-width="1" fill="none">')
    out.append(f'<path d="M{_fmt(left)},{_fmt(top)} V{_fmt(top + ph)} H{_fmt(left + pw)}"/>')
    for t in x_ticks:
        out.append(f'<line x1="{_fmt(sx(t))}" y1="{_fmt(top + ph)}" x2="{_fmt(sx(t))}" y2="{_fmt(top + ph + 5)}"/>')
    for t in y_ticks:
        out.append(f'<line x1="{_fmt(left - 5)}" y1="{_fmt(sy(t))}" x2="{_fmt(left)}" y2="{_fmt(sy(t))}"/>')
    out.append("</g>")
    out.append('<g class="tick-labels" font-family="sans-serif" font-size="11" fill="#333333">')
    for t in x_ticks:
        out.append(f'<text x="{_fmt(sx(t))}" y="{_fmt(top + ph + 18)}" text-anchor="middle">{_label(t)}</text>')
    for t in y_ticks:
        out.append(f'<text x="{_fmt(left - 8)}" y="{_fmt(sy(t) + 4)}" text-anchor="end">{_label(t)}</text>')
    out.append(f'<text x="{_fmt(left + pw / 2)}" y="{_fmt(h - 15)}" text-anchor="middle" font-size="13">'
               f'{escape(spec.x_label)}</text>')
    out.append(f'<text transform="translate(18,{_fmt(top + ph / 2)}) rotate(-90)" text-anchor="middle" '
               f'font-size="13">{escape(spec.y_label)}</text>')
    out.append("</g>")

    out.append('<g class="series">')
    if spec.kind == "line":
        for s, color in zip(spec.series, colors):
            out.append(f'<path d="{_line_path(s, sx, sy)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    else:
        base = {x: 0.0 for x in xs_all}
        for s, color in zip(spec.series, colors):
            vals = {x: (y or 0.0) for x, y in zip(s.xs, s.ys)}
            lower = [base[x] for x in xs_all]
            upper = [base[x] + vals.get(x, 0.0) for x in xs_all]
            pts = [f"{_fmt(sx(x))},{_fmt(sy(u))}" for x, u in zip(xs_all, upper)]
            pts += [f"{_fmt(sx(x))},{_fmt(sy(lo))}" for x, lo in zip(reversed(xs_all), reversed(lower))]
            out.append(f'<path d="M{" L".join(pts)} Z" fill="{color}" stroke="none"/>')
            for x, u in zip(xs_all, upper):
                base[x] = u
    out.append("</g>")

    out.append('<g class="legend" font-family="sans-serif" font-size="11">')
    lx = left + pw + 20
    for i, (s, color) in enumerate(zip(spec.series, colors)):
        ly = top + 16 * i
        out.append(f'<rect x="{_fmt(lx)}" y="{_fmt(ly)}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{_fmt(lx + 15)}" y="{_fmt(ly + 9)}">{escape(s.name)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _line_path(s, sx, sy):
    parts = []
    pen_down = False
    for x, y in zip(s.xs, s.ys):
        if y is None:
            pen_down = False
            continue
        parts.append(f"{'L' if pen_down else 'M'}{_fmt(sx(x))},{_fmt(sy(y))}")
        pen_down = True
    if len([y for y in s.ys if y is not None]) == 1:
        parts.append("h0.01")
    return " ".join(parts)
