"""Frame serialization: CSV (one file per scenario) and static SVG plots.

CSV columns are t,y,x,u,q with 17 significant digits (lossless for
binary doubles), rows ordered by (t, y).  SVG plots draw u against x as
a single polyline in sample order, which renders loops correctly; no
resampling in axis space ever happens.  Both writers are deterministic:
identical input bytes for identical frames.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .fields import ParametricCurve

CSV_HEADER = "t,y,x,u,q"


def _fmt(value: float) -> str:
    return format(value, ".17g")


def frames_to_csv(curves: list[ParametricCurve]) -> str:
    lines = [CSV_HEADER]
    for curve in sorted(curves, key=lambda c: c.t):
        t_txt = _fmt(curve.t)
        for y, x, u, q in zip(curve.y, curve.x, curve.u, curve.q):
            lines.append(f"{t_txt},{_fmt(y)},{_fmt(x)},{_fmt(u)},{_fmt(q)}")
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, curves: list[ParametricCurve]) -> Path:
    path = Path(path)
    path.write_text(frames_to_csv(curves), encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_W, _H = 720.0, 480.0
_ML, _MR, _MT, _MB = 60.0, 20.0, 36.0, 48.0


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, n)


def frame_to_svg(curve: ParametricCurve, title: str) -> str:
    """A self-contained SVG 1.1 document plotting u(x) parametrically."""
    x, u = np.asarray(curve.x), np.asarray(curve.u)
    finite = np.isfinite(x) & np.isfinite(u)
    x, u = x[finite], u[finite]
    x_lo, x_hi = float(x.min()), float(x.max())
    u_lo, u_hi = float(u.min()), float(u.max())
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    pad = 0.08 * (u_hi - u_lo) or 0.5
    u_lo, u_hi = u_lo - pad, u_hi + pad

    inner_w = _W - _ML - _MR
    inner_h = _H - _MT - _MB

    def sx(v: float) -> float:
        return _ML + (v - x_lo) / (x_hi - x_lo) * inner_w

    def sy(v: float) -> float:
        return _MT + (u_hi - v) / (u_hi - u_lo) * inner_h

    points = " ".join(f"{sx(a):.3f},{sy(b):.3f}" for a, b in zip(x, u))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_W:g}" height="{_H:g}" viewBox="0 0 {_W:g} {_H:g}">',
        f'<rect x="0" y="0" width="{_W:g}" height="{_H:g}" fill="white"/>',
        f'<rect x="{_ML:g}" y="{_MT:g}" width="{inner_w:g}" height="{inner_h:g}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
    ]
    if u_lo < 0.0 < u_hi:
        y0 = sy(0.0)
        parts.append(
            f'<line x1="{_ML:g}" y1="{y0:.3f}" x2="{_ML + inner_w:g}" y2="{y0:.3f}" '
            'stroke="#ccc" stroke-width="1"/>'
        )
    for tick in _ticks(x_lo, x_hi):
        px = sx(tick)
        parts.append(
            f'<line x1="{px:.3f}" y1="{_MT + inner_h:g}" x2="{px:.3f}" '
            f'y2="{_MT + inner_h + 5:g}" stroke="#888" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.3f}" y="{_MT + inner_h + 20:g}" font-size="12" '
            f'text-anchor="middle" font-family="sans-serif">{tick:.4g}</text>'
        )
    for tick in _ticks(u_lo, u_hi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_ML - 5:g}" y1="{py:.3f}" x2="{_ML:g}" y2="{py:.3f}" '
            'stroke="#888" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_ML - 9:g}" y="{py + 4:.3f}" font-size="12" '
            f'text-anchor="end" font-family="sans-serif">{tick:.4g}</text>'
        )
    parts.append(
        f'<text x="{_W / 2:g}" y="22" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif">{title}</text>'
    )
    parts.append(
        f'<text x="{_W / 2:g}" y="{_H - 10:g}" font-size="12" text-anchor="middle" '
        'font-family="sans-serif">x</text>'
    )
    parts.append(
        f'<text x="16" y="{_H / 2:g}" font-size="12" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {_H / 2:g})">u</text>'
    )
    parts.append(
        f'<polyline points="{points}" fill="none" stroke="#1f4e8c" stroke-width="1.5"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path: str | Path, curve: ParametricCurve, title: str) -> Path:
    path = Path(path)
    path.write_text(frame_to_svg(curve, title), encoding="utf-8")
    return path
