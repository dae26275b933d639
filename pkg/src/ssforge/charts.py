"""SVG and plain-text charts of pages.

Cells sit at (stem, filtration).  Each summand gets a glyph chosen from its
coefficient module; differentials are arrows of slope (-1, +r) drawn in a
color per page.  Output is built by string formatting only, so the same page
always renders to the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .coefficients import CyclicModule, Kind
from .pages import DifferentialRule, Page, leibniz_differential

SQUARE = "square"
DOT = "dot"
OPEN_DOT = "open-dot"
DIAMOND = "diamond"
OPEN_DIAMOND = "open-diamond"
CROSS = "cross"

TEXT_GLYPHS = {
    SQUARE: "#",
    DOT: "*",
    OPEN_DOT: "o",
    DIAMOND: "D",
    OPEN_DIAMOND: "d",
    CROSS: "x",
}

PAGE_COLORS = ("#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


def glyph_of(m: CyclicModule) -> str:
    """Glyph for a module; total over the catalog.

    Power series over W are squares, over F_q filled dots, bare F_q an open
    (red) dot, W/2^oo a diamond and divided F_q modules an open diamond.
    """
    if m.kind is Kind.WITT:
        return SQUARE
    if m.kind is Kind.QZ:
        return DIAMOND
    if m.divided:
        return OPEN_DIAMOND
    if m.surviving or m.laurent:
        return DOT
    return OPEN_DOT


@dataclass
class ChartStyle:
    unit: int = 24
    margin: int = 36
    radius: float = 4.5
    page_colors: tuple = PAGE_COLORS
    period: Optional[int] = None
    marked: frozenset = field(default_factory=frozenset)

    def color(self, r: int) -> str:
        return self.page_colors[(r.bit_length() - 2) % len(self.page_colors)]


def arrows(p: Page, rules: Sequence[DifferentialRule]) -> list[tuple[tuple, tuple, int]]:
    """(source cell, target cell, r) for every differential firing on page p."""
    out = []
    for key, s in p.summands():
        hit = leibniz_differential(p, s, rules)
        if hit is None:
            continue
        tkey = p.key_of(hit[0])
        if tkey in p.cells and p.find(hit[0]) is not None:
            out.append((key, tkey, p.r))
    return out


def _bounds(p: Page):
    w = p.view or p.window
    return w.stems, w.filts


def _glyph_svg(kind: str, x: float, y: float, rad: float) -> str:
    if kind == SQUARE:
        return f'<rect x="{x - rad:.1f}" y="{y - rad:.1f}" width="{2 * rad:.1f}" height="{2 * rad:.1f}" fill="black"/>'
    if kind == DOT:
        return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{rad:.1f}" fill="black"/>'
    if kind == OPEN_DOT:
        return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{rad:.1f}" fill="white" stroke="red" stroke-width="1.5"/>'
    pts = f"{x:.1f},{y - rad:.1f} {x + rad:.1f},{y:.1f} {x:.1f},{y + rad:.1f} {x - rad:.1f},{y:.1f}"
    if kind == DIAMOND:
        return f'<polygon points="{pts}" fill="black"/>'
    if kind == OPEN_DIAMOND:
        return f'<polygon points="{pts}" fill="white" stroke="black"/>'
    return (
        f'<path d="M{x - rad:.1f},{y - rad:.1f} L{x + rad:.1f},{y + rad:.1f} '
        f'M{x - rad:.1f},{y + rad:.1f} L{x + rad:.1f},{y - rad:.1f}" stroke="black" stroke-width="1.5"/>'
    )


def render_svg(
    p: Page,
    rules: Sequence[DifferentialRule] = (),
    style: Optional[ChartStyle] = None,
    title: Optional[str] = None,
) -> str:
    style = style or ChartStyle()
    (s0, s1), (f0, f1) = _bounds(p)
    u, m = style.unit, style.margin
    width = (s1 - s0) * u + 2 * m
    height = (f1 - f0) * u + 2 * m

    def pos(stem, filt, slot=0, count=1):
        x = m + (stem - s0 + 0.5) * u + (slot - (count - 1) / 2) * style.radius * 1.6
        y = height - m - (filt - f0 + 0.5) * u
        return x, y

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{m}" y="{m / 2:.1f}" font-size="12" font-family="monospace">{escape(title)}</text>')
    grid = []
    for stem in range(s0, s1 + 1):
        x = m + (stem - s0) * u
        grid.append(f'<line x1="{x}" y1="{m}" x2="{x}" y2="{height - m}" stroke="#eeeeee"/>')
    for filt in range(f0, f1 + 1):
        y = height - m - (filt - f0) * u
        grid.append(f'<line x1="{m}" y1="{y}" x2="{width - m}" y2="{y}" stroke="#eeeeee"/>')
    out.extend(grid)
    for stem in range(s0, s1):
        if stem % 4 == 0:
            x, _ = pos(stem, f0)
            out.append(
                f'<text x="{x:.1f}" y="{height - m / 3:.1f}" font-size="9" text-anchor="middle" '
                f'font-family="monospace">{stem}</text>'
            )
    for filt in range(f0, f1):
        if filt % 4 == 0:
            _, y = pos(s0, filt)
            out.append(
                f'<text x="{m / 2:.1f}" y="{y + 3:.1f}" font-size="9" text-anchor="middle" '
                f'font-family="monospace">{filt}</text>'
            )
    if style.period:
        for stem in range(s0, s1 + 1):
            if stem % style.period == 0:
                x = m + (stem - s0) * u
                out.append(
                    f'<line x1="{x}" y1="{m}" x2="{x}" y2="{height - m}" stroke="#999999" '
                    f'stroke-dasharray="4,3"/>'
                )
    for src, tgt, r in arrows(p, rules):
        if tgt not in p.cells:
            continue
        x1, y1 = pos(src[0], src[1])
        x2, y2 = pos(tgt[0], tgt[1])
        out.append(
            f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}" '
            f'stroke="{style.color(r)}" stroke-width="1" class="d{r}"/>'
        )
    for key in sorted(p.cells):
        if key[2] != 0:
            continue
        summands = p.cells[key]
        for slot, s in enumerate(summands):
            x, y = pos(key[0], key[1], slot, len(summands))
            kind = CROSS if key in style.marked else glyph_of(s.module)
            out.append(
                f'<g><title>{escape(s.label)}: {escape(s.module.describe())}</title>'
                f'{_glyph_svg(kind, x, y, style.radius)}</g>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_text(p: Page, style: Optional[ChartStyle] = None) -> str:
    """One character per cell; a digit when several summands share it."""
    style = style or ChartStyle()
    (s0, s1), (f0, f1) = _bounds(p)
    rows = []
    for filt in range(f1 - 1, f0 - 1, -1):
        line = []
        for stem in range(s0, s1):
            key = (stem, filt, 0)
            summands = p.cells.get(key, ())
            if not summands:
                line.append(".")
            elif len(summands) > 1:
                line.append(str(min(len(summands), 9)))
            elif key in style.marked:
                line.append(TEXT_GLYPHS[CROSS])
            else:
                line.append(TEXT_GLYPHS[glyph_of(summands[0].module)])
        rows.append(f"{filt:>4} " + "".join(line))
    axis = "".join(str(abs(s) % 10) if s % 4 == 0 else " " for s in range(s0, s1))
    rows.append("     " + axis)
    legend = "  ".join(f"{TEXT_GLYPHS[g]}={g}" for g in (SQUARE, DOT, OPEN_DOT, DIAMOND, OPEN_DIAMOND, CROSS))
    header = f"{p.preset} n={p.n} page {p.r} stems [{s0},{s1}) filtrations [{f0},{f1})"
    return "\n".join([header] + rows + [legend]) + "\n"


__all__ = [
    "CROSS",
    "DIAMOND",
    "DOT",
    "OPEN_DIAMOND",
    "OPEN_DOT",
    "SQUARE",
    "ChartStyle",
    "arrows",
    "glyph_of",
    "render_svg",
    "render_text",
]
