"""Static drawings of hybrid graphs as SVG or DOT documents.

Layout follows a measure-then-arrange scheme: word boxes are placed
right-to-left (configurable), node points are computed under each box,
then arcs and phrase bars are placed below the words using a height map
of (x, w, h) spans so that overlapping intervals stack downwards. Arcs
are emitted before labels so labels stay readable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .graph import EmptyCategory, HybridGraph, Phrase, ref_key


@dataclass
class Style:
    box_width: int = 86
    box_gap: int = 10
    line_height: int = 13
    arc_step: int = 26
    margin: int = 16
    font: str = "monospace"
    font_size: int = 10


@dataclass
class VisualNode:
    kind: str
    x: float
    y: float
    w: float
    h: float
    text: str = ""
    attrs: dict = field(default_factory=dict)
    children: list = field(default_factory=list)


class HeightMap:
    """Tracks the lowest occupied y per x-interval below the word row."""

    def __init__(self, width: float, base: float):
        self.spans: List[tuple] = [(0.0, width, base)]

    def max_height(self, x1: float, x2: float) -> float:
        best = 0.0
        for x, w, h in self.spans:
            if x < x2 and x + w > x1:
                best = max(best, h)
        return best

    def update(self, x1: float, x2: float, h: float) -> None:
        self.spans.append((x1, x2 - x1, h))


def _word_lines(term, gloss: str) -> List[str]:
    if isinstance(term, EmptyCategory):
        return ["", f"({term.form})", gloss, "*", term.pos]
    loc = str(term.location)
    return [loc, term.form, gloss, term.form, term.pos]


def layout(
    graph: HybridGraph,
    style: Optional[Style] = None,
    rtl: bool = True,
    glosses: Optional[dict] = None,
) -> VisualNode:
    """Arrange a graph into a visual tree with absolute coordinates."""
    style = style or Style()
    glosses = glosses or {}
    n = len(graph.terminals)
    root = VisualNode("canvas", 0, 0, 0, 0, attrs={"graph": graph})
    box_h = style.line_height * 5 + 6
    total_w = style.margin * 2 + n * style.box_width + max(n - 1, 0) * style.box_gap

    def slot_x(i: int) -> float:
        order = (n - 1 - i) if rtl else i
        return style.margin + order * (style.box_width + style.box_gap)

    node_points = {}
    for i, term in enumerate(graph.terminals):
        x = slot_x(i)
        box = VisualNode("wordbox", x, style.margin, style.box_width, box_h)
        for k, line in enumerate(_word_lines(term, glosses.get(i, ""))):
            box.children.append(
                VisualNode(
                    "text",
                    x + style.box_width / 2,
                    style.margin + (k + 1) * style.line_height,
                    style.box_width,
                    style.line_height,
                    text=line,
                )
            )
        root.children.append(box)
        node_points[i] = (x + style.box_width / 2, style.margin + box_h + 4)
        root.children.append(
            VisualNode("nodepoint", node_points[i][0], node_points[i][1], 2, 2,
                       attrs={"pos": graph.pos_of(i)})
        )

    base = style.margin + box_h + 8
    height_map = HeightMap(total_w, base)

    # Phrase bars first (they sit close under the words), then arcs; both
    # consult and update the height map. Edges are sorted by span width so
    # shorter arcs stay lower.
    for phrase in sorted(graph.phrases, key=lambda p: (p.end - p.start, p.start, p.tag)):
        x_left = min(node_points[phrase.start][0], node_points[phrase.end][0])
        x_right = max(node_points[phrase.start][0], node_points[phrase.end][0])
        x1 = x_left - style.box_width / 2 + 6
        x2 = x_right + style.box_width / 2 - 6
        y = height_map.max_height(x1, x2) + 12
        bar = VisualNode("phrasebar", x1, y, x2 - x1, 4, text=phrase.tag)
        root.children.append(bar)
        node_points[phrase] = ((x1 + x2) / 2, y + 6)
        height_map.update(x1, x2, y + style.line_height + 6)

    arcs = []
    for edge in sorted(
        graph.edges,
        key=lambda e: (
            abs(_anchor(node_points, e.dependent) - _anchor(node_points, e.head)),
            ref_key(e.dependent),
        ),
    ):
        x1 = _anchor(node_points, edge.dependent)
        x2 = _anchor(node_points, edge.head)
        y1 = _anchor_y(node_points, edge.dependent)
        y2 = _anchor_y(node_points, edge.head)
        lo, hi = min(x1, x2), max(x1, x2)
        depth = height_map.max_height(lo, hi) + style.arc_step
        arcs.append(
            VisualNode(
                "arc",
                lo,
                depth,
                hi - lo,
                depth,
                text=edge.relation,
                attrs={"x1": x1, "y1": y1, "x2": x2, "y2": y2, "depth": depth},
            )
        )
        height_map.update(lo, hi, depth + style.line_height)

    # Arcs are drawn before their labels (and before phrase labels would
    # overlap them), so rendering order is arcs, then label nodes.
    root.children.extend(arcs)
    for arc in arcs:
        root.children.append(
            VisualNode(
                "arclabel",
                arc.x + arc.w / 2,
                arc.attrs["depth"] + style.line_height - 2,
                arc.w,
                style.line_height,
                text=arc.text,
            )
        )
    total_h = max(
        (c.y + (c.attrs.get("depth", 0) and 0) + c.h for c in root.children),
        default=0,
    )
    depth_max = max((a.attrs["depth"] for a in arcs), default=base)
    root.w = total_w
    root.h = max(total_h, depth_max) + style.margin + style.line_height
    return root


def _anchor(points: dict, ref) -> float:
    return points[ref][0]


def _anchor_y(points: dict, ref) -> float:
    return points[ref][1]


def emit(tree: VisualNode, fmt: str = "svg") -> str:
    if fmt == "svg":
        return _emit_svg(tree)
    if fmt == "dot":
        return emit_dot(tree.attrs["graph"])
    raise ValueError(f"unknown format {fmt!r}")


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _emit_svg(tree: VisualNode, style: Optional[Style] = None) -> str:
    style = style or Style()
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{tree.w:.0f}" '
        f'height="{tree.h:.0f}" viewBox="0 0 {tree.w:.0f} {tree.h:.0f}">',
        f'<g font-family="{style.font}" font-size="{style.font_size}">',
    ]

    def walk(node: VisualNode):
        if node.kind == "wordbox":
            out.append(
                f'<rect x="{node.x:.1f}" y="{node.y:.1f}" width="{node.w:.1f}" '
                f'height="{node.h:.1f}" fill="none" stroke="#999"/>'
            )
        elif node.kind == "text" and node.text:
            out.append(
                f'<text x="{node.x:.1f}" y="{node.y:.1f}" text-anchor="middle">'
                f"{_esc(node.text)}</text>"
            )
        elif node.kind == "nodepoint":
            out.append(f'<circle cx="{node.x:.1f}" cy="{node.y:.1f}" r="2" fill="#333"/>')
        elif node.kind == "phrasebar":
            out.append(
                f'<rect x="{node.x:.1f}" y="{node.y:.1f}" width="{node.w:.1f}" '
                f'height="{node.h:.1f}" fill="#444"/>'
            )
            out.append(
                f'<text x="{node.x + node.w / 2:.1f}" y="{node.y + 14:.1f}" '
                f'text-anchor="middle">{_esc(node.text)}</text>'
            )
        elif node.kind == "arc":
            a = node.attrs
            out.append(
                f'<path d="M {a["x1"]:.1f} {a["y1"]:.1f} C {a["x1"]:.1f} {a["depth"]:.1f}, '
                f'{a["x2"]:.1f} {a["depth"]:.1f}, {a["x2"]:.1f} {a["y2"]:.1f}" '
                f'fill="none" stroke="#336" marker-end="url(#arrow)"/>'
            )
        elif node.kind == "arclabel" and node.text:
            out.append(
                f'<text x="{node.x:.1f}" y="{node.y:.1f}" text-anchor="middle" '
                f'fill="#336">{_esc(node.text)}</text>'
            )
        for child in node.children:
            walk(child)

    out.append(
        '<defs><marker id="arrow" markerWidth="6" markerHeight="6" refX="5" refY="3" '
        'orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#336"/></marker></defs>'
    )
    for child in tree.children:
        walk(child)
    out.append("</g></svg>")
    return "\n".join(out) + "\n"


def emit_dot(graph: HybridGraph) -> str:
    """Structure-only DOT output (no coordinates)."""
    lines = ["digraph hybrid {", "  rankdir=RL;", "  node [shape=box];"]
    for i, term in enumerate(graph.terminals):
        if isinstance(term, EmptyCategory):
            label = f"(*) {term.form}\\n{term.pos}"
        else:
            label = f"{term.form}\\n{term.pos}"
        lines.append(f'  t{i} [label="{label}"];')
    phrase_ids = {}
    for k, phrase in enumerate(sorted(graph.phrases)):
        phrase_ids[phrase] = f"p{k}"
        lines.append(
            f'  p{k} [label="{phrase.tag} [{phrase.start + 1}-{phrase.end + 1}]" shape=ellipse];'
        )
    def name(ref):
        return phrase_ids[ref] if isinstance(ref, Phrase) else f"t{ref}"
    for edge in sorted(graph.edges, key=lambda e: (ref_key(e.dependent), e.relation)):
        lines.append(f'  {name(edge.dependent)} -> {name(edge.head)} [label="{edge.relation}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
