"""SVG output.

Byte-identical for identical inputs: coordinates are scaled then rounded
half away from zero to integers, element order is fixed, and no fonts are
embedded (a generic CJK family is named instead).  Stable ids: every node
rect is ``stn-<id>``, every wire path is ``lwc-<id>``, which is what the
studio uses for hit testing.

The only text elements are glyph labels, port names, and (behind a flag)
net names; a constant's value travels in a ``<title>`` tooltip instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from xml.sax.saxutils import escape

from ccrs.diagnostics import error
from ccrs.ir.model import CONSTANT, CcrsDocument, Stn
from ccrs.layout.engine import LayoutGeometry
from ccrs.lower.symbols import SYMBOLS, SymbolTable

_FONT = "'Noto Sans CJK SC', 'PingFang SC', 'SimSun', sans-serif"
_FONT_SIZE = 13


@dataclass(frozen=True)
class RenderOptions:
    show_clock_regions: bool = False
    show_net_names: bool = False
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.scale <= 0:
            raise ValueError("scale must be positive")


class RenderError(Exception):
    def __init__(self, diag):
        super().__init__(diag.message)
        self.diag = diag


def render(doc: CcrsDocument, geometry: LayoutGeometry,
           symtab: SymbolTable = SYMBOLS,
           options: RenderOptions = RenderOptions()) -> bytes:
    s = _Scaler(options.scale)
    for stn in doc.all_stns():
        if stn.id not in geometry.boxes:
            raise RenderError(error("E-NO-GEOM", f"no geometry for node '{stn.id}'"))

    width, height = geometry.size
    min_x = min([0] + [seg[0] for segs in geometry.routes.values() for seg in segs]
                + [seg[2] for segs in geometry.routes.values() for seg in segs]
                + [r[0] for r in geometry.regions.values()])
    min_y = min([0] + [min(seg[1], seg[3]) for segs in geometry.routes.values()
                       for seg in segs]
                + [r[1] for r in geometry.regions.values()])
    pad = 8
    vb = (s(min_x - pad), s(min_y - pad),
          s(width - min_x + 2 * pad), s(height - min_y + 2 * pad))

    out: list[str] = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb[0]} {vb[1]} {vb[2]} {vb[3]}" '
        f'width="{vb[2]}" height="{vb[3]}" font-family="{_FONT}" '
        f'font-size="{s(_FONT_SIZE)}">')
    out.append(f"<title>{escape(doc.module)}</title>")

    if options.show_clock_regions:
        out.append('<g class="regions">')
        for domain in sorted(geometry.regions):
            x, y, w, h = geometry.regions[domain]
            out.append(
                f'<rect class="region" x="{s(x)}" y="{s(y)}" width="{s(w)}" '
                f'height="{s(h)}" fill="none" stroke="#8888aa" '
                f'stroke-dasharray="6 4"><title>{escape(domain)}</title></rect>')
        out.append("</g>")

    out.append(f'<rect class="frame" x="{s(min_x - pad)}" y="{s(min_y - pad)}" '
               f'width="{s(width - min_x + 2 * pad)}" '
               f'height="{s(height - min_y + 2 * pad)}" fill="none" '
               f'stroke="#555555"/>')

    out.append('<g class="wires" fill="none" stroke="#333333">')
    for lwc in doc.lwcs:
        segs = geometry.routes.get(lwc.id, [])
        d = " ".join(f"M {s(x1)} {s(y1)} L {s(x2)} {s(y2)}" for x1, y1, x2, y2 in segs)
        out.append(f'<path class="wire" id="lwc-{escape(lwc.id)}" d="{d}"/>')
    out.append("</g>")

    out.append('<g class="nodes">')
    for top in doc.stns:
        for stn in top.walk():
            _render_node(out, stn, geometry, symtab, s)
    out.append("</g>")

    if options.show_net_names:
        out.append('<g class="netnames" fill="#666666">')
        for lwc in doc.lwcs:
            segs = geometry.routes.get(lwc.id)
            if not segs:
                continue
            x1, y1, _, _ = segs[0]
            out.append(f'<text class="netname" x="{s(x1 + 2)}" y="{s(y1 - 3)}">'
                       f'{escape(lwc.id)}</text>')
        out.append("</g>")

    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _render_node(out: list[str], stn: Stn, geometry: LayoutGeometry,
                 symtab: SymbolTable, s: "_Scaler") -> None:
    x, y, w, h = geometry.boxes[stn.id]
    out.append(
        f'<rect class="node" id="stn-{escape(stn.id)}" x="{s(x)}" y="{s(y)}" '
        f'width="{s(w)}" height="{s(h)}" fill="#ffffff" stroke="#222222"/>')
    label = stn.label
    title = None
    if stn.kind == CONSTANT:
        label = label or symtab.keyword("constant")
        title = str(stn.attrs.get("value", 0))
    elif stn.kind == "Instance":
        title = str(stn.attrs.get("module", ""))
    ly = y + (MINLABEL_BAND if stn.children else h // 2)
    text = (f'<text class="label" x="{s(x + w // 2)}" y="{s(ly + 5)}" '
            f'text-anchor="middle">{escape(label)}')
    if title is not None:
        text += f"<title>{escape(title)}</title>"
    text += "</text>"
    out.append(text)


MINLABEL_BAND = 16


class _Scaler:
    def __init__(self, scale: float):
        self.scale = scale

    def __call__(self, value: float) -> int:
        v = value * self.scale
        # round half away from zero for cross-platform byte identity
        return int(v + 0.5) if v >= 0 else -int(-v + 0.5)
