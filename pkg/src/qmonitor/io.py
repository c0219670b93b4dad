"""CSV tables with fixed formatting and a dependency-free SVG line chart."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence, Tuple

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def fmt(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    value = float(value)
    if math.isnan(value):
        return "nan"
    return f"{value:.12g}"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Comma separated, header row, 12 significant digits, ``\\n`` line ends."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    return header, [[float(v) for v in line.split(",")] for line in lines[1:] if line]


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def _ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def write_line_chart(path, title: str, x_label: str, y_label: str,
                     series: Sequence[Tuple[str, Sequence[float], Sequence[float]]],
                     markers=False) -> Path:
    """One polyline per ``(name, xs, ys)``; non-finite points break the line."""
    width, height = 800, 500
    left, right, top, bottom = 80, 180, 50, 60
    pw, ph = width - left - right, height - top - bottom
    xs_all = [x for _, xs, ys in series for x, y in zip(xs, ys) if math.isfinite(y)]
    ys_all = [y for _, xs, ys in series for y in ys if math.isfinite(y)]
    if not xs_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1
    pad = 0.05 * (y1 - y0 or 1.0)
    y0, y1 = y0 - pad, y1 + pad

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (1 - (y - y0) / (y1 - y0)) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{left + pw / 2:.1f}" y="28" text-anchor="middle" font-size="16" '
           f'font-family="sans-serif">{_escape(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        X = px(t)
        out.append(f'<line x1="{X:.1f}" y1="{top + ph}" x2="{X:.1f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.1f}" y="{top + ph + 20}" text-anchor="middle" font-size="11" '
                   f'font-family="sans-serif">{t:g}</text>')
    for t in _ticks(y0, y1):
        Y = py(t)
        out.append(f'<line x1="{left - 5}" y1="{Y:.1f}" x2="{left}" y2="{Y:.1f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{Y + 4:.1f}" text-anchor="end" font-size="11" '
                   f'font-family="sans-serif">{t:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" text-anchor="middle" font-size="13" '
               f'font-family="sans-serif">{_escape(x_label)}</text>')
    out.append(f'<text x="20" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="13" '
               f'font-family="sans-serif" transform="rotate(-90 20 {top + ph / 2:.1f})">{_escape(y_label)}</text>')
    for idx, (name, xs, ys) in enumerate(series):
        color = COLORS[idx % len(COLORS)]
        segments, current = [], []
        for x, y in zip(xs, ys):
            if math.isfinite(y):
                current.append(f"{px(x):.2f},{py(y):.2f}")
            elif current:
                segments.append(current)
                current = []
        if current:
            segments.append(current)
        for seg in segments:
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
            if markers:
                for pt in seg:
                    cx, cy = pt.split(",")
                    out.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="none" stroke="{color}"/>')
        ly = top + 15 + 18 * idx
        out.append(f'<line x1="{left + pw + 15}" y1="{ly}" x2="{left + pw + 40}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 45}" y="{ly + 4}" font-size="11" '
                   f'font-family="sans-serif">{_escape(name)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path
