"""Minimal hand-written SVG line charts."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 480, 320
MARGIN = (60, 20, 30, 45)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _scale(vals, lo, hi, a, b, log=False):
    v = np.asarray(vals, dtype=float)
    if log:
        v, lo, hi = np.log10(v), math.log10(lo), math.log10(hi)
    span = hi - lo if hi > lo else 1.0
    return a + (v - lo) / span * (b - a)


def _fmt(v: float) -> str:
    return f"{v:.3g}"


def line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "", logx: bool = False) -> str:
    """``series`` maps a legend label to ``(x, y)`` arrays; returns SVG text."""
    xs = np.concatenate([np.asarray(x, dtype=float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, dtype=float) for _, y in series.values()])
    keep = np.isfinite(xs) & np.isfinite(ys)
    if logx:
        keep &= xs > 0
    xs, ys = xs[keep], ys[keep]
    x0, x1 = (xs.min(), xs.max()) if xs.size else (0.0, 1.0)
    y0, y1 = (min(0.0, ys.min()), ys.max()) if ys.size else (0.0, 1.0)
    left, right, top, bottom = MARGIN
    px0, px1 = left, WIDTH - right
    py0, py1 = HEIGHT - bottom, top

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<line x1="{px0}" y1="{py0}" x2="{px1}" y2="{py0}" stroke="black"/>',
           f'<line x1="{px0}" y1="{py0}" x2="{px0}" y2="{py1}" stroke="black"/>']
    for v in np.linspace(y0, y1, 5):
        py = float(_scale([v], y0, y1, py0, py1)[0])
        out.append(f'<text x="{px0 - 4}" y="{py + 4:.1f}" text-anchor="end">{_fmt(v)}</text>')
    ticks = np.logspace(math.log10(x0), math.log10(x1), 5) if logx and x0 > 0 else np.linspace(x0, x1, 5)
    for v in ticks:
        px = float(_scale([v], x0, x1, px0, px1, logx)[0])
        out.append(f'<text x="{px:.1f}" y="{py0 + 14}" text-anchor="middle">{_fmt(v)}</text>')
    if title:
        out.append(f'<text x="{WIDTH / 2}" y="16" text-anchor="middle">{escape(title)}</text>')
    if xlabel:
        out.append(f'<text x="{(px0 + px1) / 2}" y="{HEIGHT - 6}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="12" y="{(py0 + py1) / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 12 {(py0 + py1) / 2})">{escape(ylabel)}</text>')
    for k, (label, (x, y)) in enumerate(series.items()):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y) & ((x > 0) if logx else True)
        sx = _scale(x[ok], x0, x1, px0, px1, logx)
        sy = _scale(y[ok], y0, y1, py0, py1)
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(sx, sy))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = py1 + 14 * (k + 1)
        out.append(f'<text x="{px1 - 4}" y="{ly}" text-anchor="end" fill="{color}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def l0_curve_svg(lambdas, cards, errors, label: str = "path", lam_max: float | None = None) -> str:
    """Piecewise-affine curve lambda -> E(S_j) + lambda |S_j| drawn through its vertices.

    Segment j lives on (lambdas[j], lambdas[j-1]] with lambdas[-1] read as +inf.
    """
    lambdas = [float(v) for v in lambdas]
    top = lam_max if lam_max is not None else 1.2 * max(lambdas[0], 1e-12)
    xs = sorted({v for v in lambdas if v <= top} | {top})
    ys = []
    for x in xs:
        j = sum(1 for v in lambdas if v >= x)  # breakpoints at or above x
        j = min(j, len(lambdas) - 1)
        ys.append(errors[j] + x * cards[j])
    return line_chart({label: (xs, ys)}, title="l0-curve", xlabel="lambda", ylabel="E(S) + lambda |S|")


def path_curve_svg(path, lam_max: float | None = None) -> str:
    return l0_curve_svg(path.lambdas, path.cards, path.errors, path.producer, lam_max)


def mean_j_svg(grid, curves: dict, title: str = "") -> str:
    """Mean J(lambda) over trials at each grid point, one line per algorithm."""
    series = {}
    for algo, vals in curves.items():
        y = np.array([np.nan if v is None else v for v in vals], dtype=float)
        series[algo] = (np.asarray(grid, dtype=float), y)
    return line_chart(series, title=title, xlabel="lambda", ylabel="mean J", logx=True)
