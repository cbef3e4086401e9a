"""Self-contained SVG line plots: axes, ticks, legend, nothing external."""

from __future__ import annotations

import math

import numpy as np

from .errors import SchemaError

__all__ = ["render_svg"]

_PALETTE = ["#c23b22", "#2b7a2b", "#1f4e9c", "#b8860b", "#7a2b7a",
            "#006666", "#8b4513", "#444444"]

_WIDTH, _HEIGHT = 720, 480
_MARGIN = {"left": 72, "right": 24, "top": 40, "bottom": 56}


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise SchemaError("cannot plot non-finite data range")
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def render_svg(series, title: str = "", xlabel: str = "", ylabel: str = "") -> str:
    """Render line series [{label, x, y}] into a standalone SVG string."""
    if not series:
        raise SchemaError("nothing to plot")
    xs = np.concatenate([np.asarray(s["x"], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s["y"], dtype=float) for s in series])
    if xs.size == 0:
        raise SchemaError("nothing to plot")
    x_lo, x_hi = float(np.min(xs)), float(np.max(xs))
    y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    px0, px1 = _MARGIN["left"], _WIDTH - _MARGIN["right"]
    py0, py1 = _HEIGHT - _MARGIN["bottom"], _MARGIN["top"]

    def sx(v):
        return px0 + (v - x_lo) / (x_hi - x_lo) * (px1 - px0)

    def sy(v):
        return py0 + (v - y_lo) / (y_hi - y_lo) * (py1 - py0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
        'fill="none" stroke="#222222" stroke-width="1"/>',
    ]
    for tick in _nice_ticks(x_lo, x_hi):
        x = sx(tick)
        parts.append(
            f'<line x1="{x:.2f}" y1="{py0}" x2="{x:.2f}" y2="{py0 + 5}" '
            'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{py0 + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{_fmt(tick)}</text>'
        )
    for tick in _nice_ticks(y_lo, y_hi):
        y = sy(tick)
        parts.append(
            f'<line x1="{px0 - 5}" y1="{y:.2f}" x2="{px0}" y2="{y:.2f}" '
            'stroke="#222222" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px0 - 8}" y="{y + 4:.2f}" font-size="11" '
            f'text-anchor="end" font-family="sans-serif">{_fmt(tick)}</text>'
        )

    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        pts = " ".join(
            f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
            for x, y in zip(s["x"], s["y"])
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            'stroke-width="1.5"/>'
        )

    # legend
    lx, ly = px0 + 12, py1 + 10
    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        y = ly + 16 * k
        parts.append(
            f'<line x1="{lx}" y1="{y + 4}" x2="{lx + 22}" y2="{y + 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{y + 8}" font-size="11" '
            f'font-family="sans-serif">{s["label"]}</text>'
        )

    if title:
        parts.append(
            f'<text x="{(px0 + px1) / 2}" y="{py1 - 14}" font-size="14" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{(px0 + px1) / 2}" y="{_HEIGHT - 14}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="18" y="{(py0 + py1) / 2}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'transform="rotate(-90 18 {(py0 + py1) / 2})">{ylabel}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
