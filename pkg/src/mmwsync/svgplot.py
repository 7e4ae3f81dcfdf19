"""Minimal static SVG line plots; no external plotting dependency.

Output is deterministic: fixed canvas geometry, fixed palette, and fixed
coordinate formatting.
"""

from __future__ import annotations

import math

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2")

_W, _H = 760, 480
_ML, _MR, _MT, _MB = 70, 170, 40, 55


def _ticks(lo: float, hi: float, n: int = 6) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * abs(step):
        ticks.append(round(v, 12))
        v += step
    return ticks


def _log_ticks(lo: float, hi: float) -> list:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0**e for e in range(lo_e, hi_e + 1)]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:g}"


def line_plot(path, title: str, xlabel: str, ylabel: str, series: list,
              log_y: bool = False) -> None:
    """Write one SVG line plot.

    ``series`` is a list of (label, xs, ys, dashed) tuples.  On a log axis,
    non-positive y values are dropped from the drawn polyline.
    """
    pts = []
    for _, xs, ys, _ in series:
        for x, y in zip(xs, ys):
            if math.isfinite(x) and math.isfinite(y) and (not log_y or y > 0):
                pts.append((x, y))
    if not pts:
        pts = [(0.0, 1.0), (1.0, 1.0)]
    xs_all = [p[0] for p in pts]
    ys_all = [p[1] for p in pts]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if log_y:
        y_ticks = _log_ticks(y_lo, y_hi)
        y_lo, y_hi = math.log10(y_ticks[0]), math.log10(y_ticks[-1])
        if y_hi == y_lo:
            y_hi = y_lo + 1.0
    else:
        pad = 0.05 * (y_hi - y_lo or 1.0)
        y_lo, y_hi = y_lo - pad, y_hi + pad
        y_ticks = _ticks(y_lo, y_hi)
    x_ticks = _ticks(x_lo, x_hi)

    px_w = _W - _ML - _MR
    px_h = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * px_w

    def sy(y):
        v = math.log10(y) if log_y else y
        return _MT + (y_hi - v) / (y_hi - y_lo) * px_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-size="15">{title}</text>']

    for xt in x_ticks:
        if x_lo <= xt <= x_hi:
            x = sx(xt)
            out.append(f'<line x1="{x:.2f}" y1="{_MT}" x2="{x:.2f}" y2="{_H - _MB}" '
                       'stroke="#dddddd" stroke-width="1"/>')
            out.append(f'<text x="{x:.2f}" y="{_H - _MB + 18}" text-anchor="middle">{_fmt(xt)}</text>')
    for yt in y_ticks:
        v = math.log10(yt) if log_y else yt
        if y_lo - 1e-12 <= v <= y_hi + 1e-12:
            y = sy(yt)
            out.append(f'<line x1="{_ML}" y1="{y:.2f}" x2="{_W - _MR}" y2="{y:.2f}" '
                       'stroke="#dddddd" stroke-width="1"/>')
            out.append(f'<text x="{_ML - 8}" y="{y + 4:.2f}" text-anchor="end">{_fmt(yt)}</text>')

    out.append(f'<rect x="{_ML}" y="{_MT}" width="{px_w}" height="{px_h}" '
               'fill="none" stroke="black" stroke-width="1"/>')
    out.append(f'<text x="{_ML + px_w / 2:.1f}" y="{_H - 12}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="18" y="{_MT + px_h / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {_MT + px_h / 2:.1f})">{ylabel}</text>')

    for idx, (label, xs, ys, dashed) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        coords = [(x, y) for x, y in zip(xs, ys)
                  if math.isfinite(x) and math.isfinite(y) and (not log_y or y > 0)]
        if coords:
            path_d = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in coords)
            out.append(f'<polyline points="{path_d}" fill="none" stroke="{color}" '
                       f'stroke-width="1.8"{dash}/>')
        ly = _MT + 16 * idx + 8
        out.append(f'<line x1="{_W - _MR + 10}" y1="{ly}" x2="{_W - _MR + 34}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.8"{dash}/>')
        out.append(f'<text x="{_W - _MR + 40}" y="{ly + 4}">{label}</text>')

    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
