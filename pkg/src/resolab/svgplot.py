"""Deterministic static SVG scatter of a zero set.

Hand-rolled markup (no plotting library) so identical inputs give
byte-identical files: eigenvalues as filled circles, resonances as open
circles, an origin zero as a cross.
"""

from __future__ import annotations

import math

from .spectrum import ZeroSet

_W, _H = 640, 480
_MARGIN = 54


def _nice_step(span: float) -> float:
    if span <= 0:
        return 1.0
    raw = span / 6.0
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            return mult * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float):
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * max(1.0, abs(hi)):
        out.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return out


def _fmt(x: float) -> str:
    return format(x, ".6g")


def zero_set_svg(zs: ZeroSet, title: str = "") -> str:
    re0, re1, im0, im1 = zs.region
    x0, x1 = _MARGIN, _W - _MARGIN
    y0, y1 = _H - _MARGIN, _MARGIN  # svg y grows downward

    def sx(re: float) -> float:
        return x0 + (re - re0) / (re1 - re0) * (x1 - x0)

    def sy(im: float) -> float:
        return y0 + (im - im0) / (im1 - im0) * (y1 - y0)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_W // 2}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="13">{title}</text>'
        )
    for tick in _ticks(re0, re1):
        px = sx(tick)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{y0 + 18}" text-anchor="middle" '
            f'font-family="monospace" font-size="11">{_fmt(tick)}</text>'
        )
    for tick in _ticks(im0, im1):
        py = sy(tick)
        parts.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{_fmt(py + 3.5)}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{_fmt(tick)}</text>'
        )
    # axes through 0 when visible
    if re0 < 0.0 < re1:
        parts.append(
            f'<line x1="{_fmt(sx(0.0))}" y1="{y1}" x2="{_fmt(sx(0.0))}" y2="{y0}" '
            'stroke="#bbbbbb" stroke-width="0.8"/>'
        )
    if im0 < 0.0 < im1:
        parts.append(
            f'<line x1="{x0}" y1="{_fmt(sy(0.0))}" x2="{x1}" y2="{_fmt(sy(0.0))}" '
            'stroke="#bbbbbb" stroke-width="0.8"/>'
        )
    parts.append(
        f'<text x="{_W // 2}" y="{_H - 12}" text-anchor="middle" '
        'font-family="monospace" font-size="12">Re k</text>'
    )
    parts.append(
        f'<text x="16" y="{_H // 2}" text-anchor="middle" font-family="monospace" '
        f'font-size="12" transform="rotate(-90 16 {_H // 2})">Im k</text>'
    )
    for p in zs.points:
        px, py = _fmt(sx(p.k.real)), _fmt(sy(p.k.imag))
        if p.kind == "eigenvalue":
            parts.append(f'<circle cx="{px}" cy="{py}" r="4" fill="black"/>')
        elif p.kind == "origin":
            x, y = sx(p.k.real), sy(p.k.imag)
            parts.append(
                f'<path d="M {_fmt(x - 4)} {_fmt(y - 4)} L {_fmt(x + 4)} {_fmt(y + 4)} '
                f'M {_fmt(x - 4)} {_fmt(y + 4)} L {_fmt(x + 4)} {_fmt(y - 4)}" '
                'stroke="black" stroke-width="1.5" fill="none"/>'
            )
        else:
            parts.append(
                f'<circle cx="{px}" cy="{py}" r="4" fill="none" stroke="black" stroke-width="1.2"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
