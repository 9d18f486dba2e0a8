"""Minimal self-contained SVG line plots from CSV columns."""
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from ._io import atomic_write
from .errors import SchemaError

_UNITS = {
    "s": "s", "hz": "Hz", "m": "m", "k": "K", "w": "W", "j": "J",
    "w_per_m2": "W/m²", "hz_per_s": "Hz/s", "rad_per_s": "rad/s",
}

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=80, right=20, top=30, bottom=60)


@dataclass(frozen=True)
class PlotSpec:
    x: str
    y: str
    title: str = ""


def axis_label(column):
    """'delta_hz' -> 'delta [Hz]'; columns without a known unit suffix are kept."""
    parts = column.split("_")
    for n in (3, 2, 1):
        if len(parts) > n:
            suffix = "_".join(parts[-n:])
            if suffix in _UNITS:
                return f"{' '.join(parts[:-n])} [{_UNITS[suffix]}]"
    return column.replace("_", " ")


def read_columns(csv_path, names):
    with open(csv_path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{csv_path}: empty CSV") from None
        missing = [n for n in names if n not in header]
        if missing:
            raise SchemaError(f"{csv_path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(n) for n in names]
        cols = [[] for _ in names]
        for row in reader:
            if not row:
                continue
            for c, i in zip(cols, idx):
                c.append(float(row[i]))
    if not cols[0]:
        raise SchemaError(f"{csv_path}: no data rows")
    return cols


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(v)
        v += step
    return out


def render_svg(xs, ys, spec):
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def sx(x):
        return MARGIN["left"] + (x - x_lo) / (x_hi - x_lo) * pw

    def sy(y):
        return MARGIN["top"] + (y_hi - y) / (y_hi - y_lo) * ph

    pts = " ".join(f"{sx(x):.3f},{sy(y):.3f}" for x, y in zip(xs, ys))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
        'fill="none" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        lines.append(f'<text class="xtick" x="{sx(t):.3f}" y="{HEIGHT - MARGIN["bottom"] + 18}" '
                     f'font-size="11" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y_lo, y_hi):
        lines.append(f'<text class="ytick" x="{MARGIN["left"] - 6}" y="{sy(t) + 4:.3f}" '
                     f'font-size="11" text-anchor="end">{t:.4g}</text>')
    lines += [
        f'<polyline fill="none" stroke="#1f4e99" stroke-width="1.2" points="{pts}"/>',
        f'<text class="xlabel" x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 15}" '
        f'font-size="13" text-anchor="middle">{escape(axis_label(spec.x))}</text>',
        f'<text class="ylabel" x="18" y="{MARGIN["top"] + ph / 2}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 18 {MARGIN["top"] + ph / 2})">'
        f'{escape(axis_label(spec.y))}</text>',
    ]
    if spec.title:
        lines.append(f'<text x="{WIDTH / 2}" y="20" font-size="14" '
                     f'text-anchor="middle">{escape(spec.title)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def emit_plot(csv_path, spec, svg_path=None):
    """Render one column against another; returns the SVG path."""
    xs, ys = read_columns(csv_path, [spec.x, spec.y])
    svg_path = Path(svg_path) if svg_path else Path(csv_path).with_suffix(".svg")
    atomic_write(svg_path, render_svg(xs, ys, spec).encode())
    return svg_path
