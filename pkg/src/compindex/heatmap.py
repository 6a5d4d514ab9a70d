"""7x7 workspace heatmaps as SVG, CSV matrix, or shaded terminal text.

Cells hold one scalar per target; ``nan`` or ``None`` marks a flagged cell,
which is hatched and left out of the colour scale.
"""

from __future__ import annotations

import math
from typing import Mapping
from xml.sax.saxutils import escape

from .errors import AllCellsFlagged
from .model import TARGETS, GridSpec

LIGHT = (247, 251, 255)
DARK = (8, 48, 107)
SHADES = " ░▒▓█"

CELL = 64
MARGIN = 40
LEGEND_W = 18


def target_to_cell(n: int, grid: GridSpec | None = None) -> tuple[int, int]:
    return (grid or GridSpec()).cell(n)


def _clean(values: Mapping[int, float | None]) -> dict[int, float]:
    missing = [n for n in TARGETS if n not in values]
    if missing:
        raise ValueError(f"heatmap needs all 49 targets; missing {missing}")
    return {n: math.nan if values[n] is None else float(values[n]) for n in TARGETS}


def value_range(values: Mapping[int, float], scale: tuple[float, float] | None = None) -> tuple[float, float]:
    if scale is not None:
        lo, hi = map(float, scale)
        if not hi >= lo:
            raise ValueError(f"scale upper bound {hi} below lower bound {lo}")
        return lo, hi
    finite = [v for v in values.values() if math.isfinite(v)]
    if not finite:
        raise AllCellsFlagged("every cell is flagged; nothing to scale")
    return min(finite), max(finite)


def ramp_position(v: float, lo: float, hi: float) -> float:
    if hi == lo:
        return 0.5
    return min(1.0, max(0.0, (v - lo) / (hi - lo)))


def ramp_rgb(t: float) -> tuple[int, int, int]:
    """Single-hue ramp, light at 0 to deep blue at 1; every channel is monotone."""
    return tuple(round(a + (b - a) * t) for a, b in zip(LIGHT, DARK))


def _hex(rgb) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _label(v: float, fmt: str) -> str:
    return format(v, fmt)


def render_svg(
    values: Mapping[int, float | None],
    grid: GridSpec | None = None,
    title: str = "",
    scale: tuple[float, float] | None = None,
    fmt: str = ".3g",
) -> str:
    grid = grid or GridSpec()
    vals = _clean(values)
    if all(math.isnan(v) for v in vals.values()):
        raise AllCellsFlagged("every cell is flagged; nothing to render")
    lo, hi = value_range(vals, scale)

    width = MARGIN * 2 + grid.cols * CELL + 3 * LEGEND_W + 60
    height = MARGIN * 2 + grid.rows * CELL
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        "<defs>",
        '<pattern id="hatch" patternUnits="userSpaceOnUse" width="8" height="8">',
        '<rect width="8" height="8" fill="#ffffff"/>',
        '<path d="M0,8 L8,0 M-2,2 L2,-2 M6,10 L10,6" stroke="#888888" stroke-width="1.5"/>',
        "</pattern>",
        '<linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0">',
        f'<stop offset="0" stop-color="{_hex(ramp_rgb(0.0))}"/>',
        f'<stop offset="1" stop-color="{_hex(ramp_rgb(1.0))}"/>',
        "</linearGradient>",
        "</defs>",
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-size="16">{escape(title)}</text>')

    for n in TARGETS:
        row, col = grid.cell(n)
        x = MARGIN + (col - 1) * CELL
        y = MARGIN + (row - 1) * CELL
        v = vals[n]
        if math.isnan(v):
            fill, text_fill, label, data = "url(#hatch)", "#000000", "n/a", "nan"
        else:
            t = ramp_position(v, lo, hi)
            fill = _hex(ramp_rgb(t))
            text_fill = "#ffffff" if t > 0.55 else "#000000"
            label, data = _label(v, fmt), repr(v)
        out.append(
            f'<rect class="cell" data-target="{n}" data-row="{row}" data-col="{col}" data-value="{data}" '
            f'x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#ffffff"/>'
        )
        out.append(f'<text x="{x + 4}" y="{y + 13}" font-size="10" fill="{text_fill}">{n}</text>')
        out.append(
            f'<text x="{x + CELL / 2:g}" y="{y + CELL / 2 + 6:g}" font-size="13" text-anchor="middle" '
            f'fill="{text_fill}">{label}</text>'
        )

    lx = MARGIN + grid.cols * CELL + LEGEND_W
    ly, lh = MARGIN, grid.rows * CELL
    if hi == lo:
        out.append(
            f'<rect class="legend" x="{lx}" y="{ly}" width="{LEGEND_W}" height="{lh}" '
            f'fill="{_hex(ramp_rgb(0.5))}"/>'
        )
        out.append(f'<text class="legend-value" x="{lx + LEGEND_W + 6}" y="{ly + lh / 2:g}" font-size="12">'
                   f"{_label(lo, fmt)}</text>")
    else:
        out.append(f'<rect class="legend" x="{lx}" y="{ly}" width="{LEGEND_W}" height="{lh}" fill="url(#ramp)"/>')
        out.append(f'<text class="legend-max" data-value="{hi!r}" x="{lx + LEGEND_W + 6}" y="{ly + 10}" '
                   f'font-size="12">{_label(hi, fmt)}</text>')
        out.append(f'<text class="legend-min" data-value="{lo!r}" x="{lx + LEGEND_W + 6}" y="{ly + lh}" '
                   f'font-size="12">{_label(lo, fmt)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_csv(values: Mapping[int, float | None], grid: GridSpec | None = None) -> str:
    """7x7 matrix in grid layout, 6 significant digits, ``nan`` for flagged cells."""
    grid = grid or GridSpec()
    vals = _clean(values)
    lines = []
    for row in range(1, grid.rows + 1):
        cells = []
        for col in range(1, grid.cols + 1):
            v = vals[grid.target_at(row, col)]
            cells.append("nan" if math.isnan(v) else format(v, ".6g"))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def parse_csv(text: str, grid: GridSpec | None = None) -> dict[int, float]:
    grid = grid or GridSpec()
    rows = [line for line in text.splitlines() if line.strip()]
    if len(rows) != grid.rows:
        raise ValueError(f"expected {grid.rows} rows, got {len(rows)}")
    out = {}
    for r, line in enumerate(rows, start=1):
        cells = line.split(",")
        if len(cells) != grid.cols:
            raise ValueError(f"row {r}: expected {grid.cols} values, got {len(cells)}")
        for c, cell in enumerate(cells, start=1):
            out[grid.target_at(r, c)] = float(cell)
    return dict(sorted(out.items()))


def render_terminal(
    values: Mapping[int, float | None],
    grid: GridSpec | None = None,
    scale: tuple[float, float] | None = None,
    ansi: bool = False,
    fmt: str = ".3g",
) -> str:
    grid = grid or GridSpec()
    vals = _clean(values)
    lo, hi = value_range(vals, scale)
    lines = []
    for row in range(1, grid.rows + 1):
        cells = []
        for col in range(1, grid.cols + 1):
            v = vals[grid.target_at(row, col)]
            if math.isnan(v):
                cells.append("  ////// ")
                continue
            t = ramp_position(v, lo, hi)
            shade = SHADES[min(len(SHADES) - 1, int(t * len(SHADES)))]
            text = f"{shade}{_label(v, fmt):>7} "
            if ansi:
                r, g, b = ramp_rgb(t)
                fg = "97" if t > 0.55 else "30"
                text = f"\x1b[48;2;{r};{g};{b}m\x1b[{fg}m{text}\x1b[0m"
            cells.append(text)
        lines.append("".join(cells).rstrip())
    lines.append(f"scale: {_label(lo, fmt)} .. {_label(hi, fmt)}")
    return "\n".join(lines) + "\n"
