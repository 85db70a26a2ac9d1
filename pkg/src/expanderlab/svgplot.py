"""Byte-deterministic standalone SVG line plots.

No plotting library: identical inputs must produce identical bytes, and the
mainstream backends embed metadata that varies between runs.  Output is a
fixed-size chart with axes, ticks, polyline series with circle markers, and a
legend.
"""

from __future__ import annotations

import math
import os
import tempfile

from .errors import InvalidArgumentError

WIDTH, HEIGHT = 640.0, 440.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 72.0, 24.0, 40.0, 52.0
PALETTE = ("#1f6fb2", "#d1495b", "#3e8e5a", "#8a5bb8", "#c28e2c", "#4f4f4f")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        pad = abs(lo) * 0.5 or 1.0
        lo, hi = lo - pad, hi + pad
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(s * mag for s in (1.0, 2.0, 5.0, 10.0) if s * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + step * 1e-9:
        ticks.append(0.0 if abs(v) < step * 1e-9 else v)
        v += step
    return ticks


def _fmt(x: float) -> str:
    return format(x, ".3f")


def _tick_label(v: float, logscale: bool) -> str:
    if logscale:
        return format(10.0 ** v, ".3g")
    return format(v, ".6g")


def emit_plot(series, path, *, title: str = "", xlabel: str = "", ylabel: str = "",
              loglog: bool = False) -> None:
    """Write an SVG line chart of ``series = [(name, [(x, y), ...]), ...]``.

    With ``loglog=True`` both coordinates must be strictly positive and the
    axes show the original values on a log scale.  Single-point series render
    as a lone marker.  Writing is atomic (temp file + rename).
    """
    series = [(str(name), [(float(x), float(y)) for x, y in pts]) for name, pts in series]
    if not series or any(not pts for _, pts in series):
        raise InvalidArgumentError("every series must contain at least one point")
    if loglog:
        for name, pts in series:
            if any(x <= 0.0 or y <= 0.0 for x, y in pts):
                raise InvalidArgumentError(f"series {name!r} has nonpositive values; "
                                           "log-log plots need positive coordinates")
        series = [(name, [(math.log10(x), math.log10(y)) for x, y in pts])
                  for name, pts in series]

    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi <= xlo:
        pad = abs(xlo) * 0.5 or 1.0
        xlo, xhi = xlo - pad, xhi + pad
    if yhi <= ylo:
        pad = abs(ylo) * 0.5 or 1.0
        ylo, yhi = ylo - pad, yhi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - xlo) / (xhi - xlo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + plot_h - (y - ylo) / (yhi - ylo) * plot_h

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0f}" '
               f'height="{HEIGHT:.0f}" viewBox="0 0 {WIDTH:.0f} {HEIGHT:.0f}">')
    out.append(f'<rect x="0" y="0" width="{WIDTH:.0f}" height="{HEIGHT:.0f}" fill="#ffffff"/>')
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="15">{_escape(title)}</text>')

    frame = (f'M {_fmt(MARGIN_L)} {_fmt(MARGIN_T)} H {_fmt(WIDTH - MARGIN_R)} '
             f'V {_fmt(HEIGHT - MARGIN_B)} H {_fmt(MARGIN_L)} Z')
    out.append(f'<path d="{frame}" fill="none" stroke="#333333" stroke-width="1"/>')

    for v in _nice_ticks(xlo, xhi):
        if not xlo <= v <= xhi:
            continue
        x = px(v)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(HEIGHT - MARGIN_B)}" '
                   f'x2="{_fmt(x)}" y2="{_fmt(HEIGHT - MARGIN_B + 5)}" stroke="#333333"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(HEIGHT - MARGIN_B + 18)}" '
                   f'text-anchor="middle" font-family="sans-serif" font-size="11">'
                   f'{_tick_label(v, loglog)}</text>')
    for v in _nice_ticks(ylo, yhi):
        if not ylo <= v <= yhi:
            continue
        y = py(v)
        out.append(f'<line x1="{_fmt(MARGIN_L - 5)}" y1="{_fmt(y)}" '
                   f'x2="{_fmt(MARGIN_L)}" y2="{_fmt(y)}" stroke="#333333"/>')
        out.append(f'<text x="{_fmt(MARGIN_L - 8)}" y="{_fmt(y + 4)}" '
                   f'text-anchor="end" font-family="sans-serif" font-size="11">'
                   f'{_tick_label(v, loglog)}</text>')

    if xlabel:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="{HEIGHT - 12:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{_escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{HEIGHT / 2:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" '
                   f'transform="rotate(-90 16 {HEIGHT / 2:.1f})">{_escape(ylabel)}</text>')

    for i, (name, pts) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        if len(pts) > 1:
            coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"/>')
        for x, y in pts:
            out.append(f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" '
                       f'fill="{color}"/>')

    ly = MARGIN_T + 8.0
    for i, (name, _) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        y = ly + i * 16.0
        x0 = WIDTH - MARGIN_R - 150.0
        out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y)}" x2="{_fmt(x0 + 22)}" '
                   f'y2="{_fmt(y)}" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{_fmt(x0 + 28)}" y="{_fmt(y + 4)}" '
                   f'font-family="sans-serif" font-size="11">{_escape(name)}</text>')

    out.append("</svg>")
    text = "\n".join(out) + "\n"
    write_text_atomic(path, text)


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def write_text_atomic(path, text: str) -> None:
    """Write text via a temp file and rename, so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".elab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
