"""Minimal deterministic SVG line plots for sweep CSVs.

The CSV is the authoritative artifact; these plots are drawn straight from
result rows with no recomputation (and no plotting dependency), so output
bytes are stable for identical input.
"""

from __future__ import annotations

import math
from pathlib import Path

__all__ = ["plot_rows"]

_PALETTE = (
    "#14286e", "#c1272d", "#0072bd", "#77ac30", "#7e2f8e",
    "#edb120", "#4dbeee", "#a2142f", "#555555", "#2ca02c",
)

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 16, 28, 46


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min(s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12:
        out.append(round(t, 10))
        t += step
    return out


def _fmt(v: float) -> str:
    return format(v, ".6g")


def plot_rows(rows, path, title: str = "") -> None:
    """Render one polyline per series.

    If every row shares the same SNR the x-axis is the sampling factor S,
    otherwise it is SNR in dB with one series per (experiment, S).
    """
    rows = [r for r in rows if not math.isnan(r.mi_bpcu)]
    if not rows:
        Path(path).write_text(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}"/>\n'
        )
        return
    snrs = {r.snr_db for r in rows}
    if len(snrs) == 1:
        x_of = lambda r: r.s_factor
        key_of = lambda r: r.experiment
        x_label = "spatial sampling factor S"
    else:
        x_of = lambda r: r.snr_db
        key_of = lambda r: (
            r.experiment if len({q.s_factor for q in rows if q.experiment == r.experiment}) == 1
            else f"{r.experiment} S={_fmt(r.s_factor)}"
        )
        x_label = "SNR (dB)"

    series: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        series.setdefault(key_of(r), []).append((x_of(r), r.mi_bpcu))
    for pts in series.values():
        pts.sort()

    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(0.0, min(ys)), max(ys) * 1.05 + 1e-9
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def sx(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2:.1f}" y="16" text-anchor="middle" '
                     f'font-size="13">{title}</text>')
    for t in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{sx(t):.1f}" y1="{_MT}" x2="{sx(t):.1f}" '
                     f'y2="{_H - _MB}" stroke="#ddd"/>')
        parts.append(f'<text x="{sx(t):.1f}" y="{_H - _MB + 14}" '
                     f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        parts.append(f'<line x1="{_ML}" y1="{sy(t):.1f}" x2="{_W - _MR}" '
                     f'y2="{sy(t):.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{_ML - 6}" y="{sy(t) + 3:.1f}" '
                     f'text-anchor="end">{_fmt(t)}</text>')
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
                 f'height="{_H - _MT - _MB}" fill="none" stroke="#333"/>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 10}" '
                 f'text-anchor="middle">{x_label}</text>')
    parts.append(f'<text x="14" y="{(_MT + _H - _MB) / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 14 {(_MT + _H - _MB) / 2:.1f})">'
                 "mutual information (bpcu)</text>")

    for i, (label, pts) in enumerate(sorted(series.items())):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                     f'stroke-width="1.6"/>')
        for x, y in pts:
            parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.2" '
                         f'fill="{color}"/>')
        ly = _MT + 14 + 14 * i
        parts.append(f'<line x1="{_ML + 8}" y1="{ly - 4}" x2="{_ML + 28}" '
                     f'y2="{ly - 4}" stroke="{color}" stroke-width="1.6"/>')
        parts.append(f'<text x="{_ML + 33}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", newline="\n")
