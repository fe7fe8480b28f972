"""Higraph diagrams for "conjunction of makes" definitions.

A definition of the shape ``make[o](and(make[m1](p1), ..., make[mk](pk)))``
is drawn as follows:

* every conjunction column is one filled circle (an argument-place);
  operand arguments not selected by their conjunct get a private place;
* each conjunct is a coloured chain of directed edges through the places
  of its predicate's arguments, labelled on the first edge;
* places selected by the outer make are black, all others gray;
* the only contours kept are the new predicate's (around the black
  places) and one per unary conjunct.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Union
from xml.sax.saxutils import escape, quoteattr

import numpy as np
from scipy.spatial import ConvexHull

from .ast import (
    BUILTINS,
    And,
    Definition,
    Foldl,
    Foldr,
    Make,
    Or,
    PredRef,
    Program,
    arity_of,
    flatten,
    pretty_print,
    walk,
)
from .errors import ArityMismatch, NotDiagrammable

PALETTE = (
    ("red", "#d62728"),
    ("green", "#2ca02c"),
    ("blue", "#1f77b4"),
    ("orange", "#ff7f0e"),
    ("purple", "#9467bd"),
    ("brown", "#8c564b"),
    ("pink", "#e377c2"),
    ("olive", "#bcbd22"),
    ("cyan", "#17becf"),
    ("gray", "#7f7f7f"),
)

PALETTE_ORDERS = ("paper", "conjunct")

BLACK_FILL = "#000000"
GRAY_FILL = "#9e9e9e"
PLACE_RADIUS = 6
CONTOUR_INFLATION = 18
LABEL_OFFSET = 10
MARGIN = 40

_SUPERSCRIPTS = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


class HigraphWarning(UserWarning):
    pass


class Shade(enum.Enum):
    BLACK = "black"
    GRAY = "gray"


class ContourKind(enum.Enum):
    NEW_PREDICATE = "new-predicate"
    UNARY_PREDICATE = "unary-predicate"


@dataclass(frozen=True)
class SharedColumn:
    index: int


@dataclass(frozen=True)
class PrivateArg:
    conjunct: int
    arg: int


@dataclass(frozen=True)
class ArgumentPlace:
    id: int
    shade: Shade
    origin: Union[SharedColumn, PrivateArg]


@dataclass(frozen=True)
class ArgumentOrder:
    label: str
    places: tuple
    colour: str
    colour_name: str
    predicate: str
    conjunct: int

    @property
    def edges(self) -> tuple:
        return tuple(zip(self.places, self.places[1:]))

    @property
    def first_edge(self) -> Optional[tuple]:
        """The edge carrying the predicate name; None for unary predicates."""
        return self.edges[0] if len(self.places) > 1 else None


@dataclass(frozen=True)
class Contour:
    label: str
    members: frozenset
    kind: ContourKind


@dataclass(frozen=True)
class Conjunct:
    indices: tuple
    predicate: str


@dataclass(frozen=True)
class NormalForm:
    name: str
    outer: tuple
    conjuncts: tuple

    @property
    def columns(self) -> int:
        return len(self.conjuncts[0].indices)


@dataclass
class HigraphModel:
    places: tuple
    orders: tuple
    contours: tuple
    new_predicate_name: str
    warnings: list = field(default_factory=list)

    def place(self, pid: int) -> ArgumentPlace:
        for p in self.places:
            if p.id == pid:
                return p
        raise KeyError(pid)

    @property
    def black(self) -> frozenset:
        return frozenset(p.id for p in self.places if p.shade is Shade.BLACK)

    @property
    def new_predicate_contour(self) -> Contour:
        return next(c for c in self.contours if c.kind is ContourKind.NEW_PREDICATE)

    @property
    def edges(self) -> list:
        return [(e, o) for o in self.orders for e in o.edges]


def _identity(n):
    return tuple(range(1, n + 1))


def _conjunct(expr, program) -> Conjunct:
    if isinstance(expr, Make) and isinstance(expr.operand, PredRef):
        return Conjunct(expr.indices, expr.operand.name)
    if isinstance(expr, PredRef):
        if program is None:
            raise ValueError("a program is needed to look up the arity of a bare predicate")
        return Conjunct(_identity(arity_of(expr, program)), expr.name)
    raise NotDiagrammable(f"conjunct {pretty_print(expr)} is not a make over a predicate")


def _reject(expr):
    for node in walk(expr):
        if isinstance(node, Or):
            raise NotDiagrammable("disjunction (or) is not diagrammable")
        if isinstance(node, (Foldr, Foldl)):
            raise NotDiagrammable("folds are not diagrammable")


def normalize_to_conjunction_of_makes(definition: Definition, program: Optional[Program] = None
                                      ) -> NormalForm:
    body = flatten(definition.body)
    _reject(body)
    if isinstance(body, PredRef):
        c = _conjunct(body, program)
        return NormalForm(definition.name, c.indices, (c,))
    if isinstance(body, And):
        conjuncts = tuple(_conjunct(op, program) for op in body.operands)
        outer = _identity(len(conjuncts[0].indices))
    elif isinstance(body, Make):
        inner = body.operand
        if isinstance(inner, PredRef):
            if program is None:
                raise ValueError("a program is needed to look up the arity of a bare predicate")
            conjuncts = (Conjunct(_identity(arity_of(inner, program)), inner.name),)
        elif isinstance(inner, And):
            conjuncts = tuple(_conjunct(op, program) for op in inner.operands)
        else:
            raise NotDiagrammable(f"nested make {pretty_print(body)} is not a conjunction of makes")
        outer = body.indices
    else:
        raise NotDiagrammable(f"{pretty_print(body)} is not a conjunction of makes")
    width = len(conjuncts[0].indices)
    for c in conjuncts[1:]:
        if len(c.indices) != width:
            raise ArityMismatch("and", width, len(c.indices))
    return NormalForm(definition.name, tuple(outer), conjuncts)


def _predicate_arity(name, program) -> int:
    if program is None:
        if name in BUILTINS:
            return BUILTINS[name]
        raise ValueError(f"arity of '{name}' unknown without a program")
    return arity_of(PredRef(name), program)


def build_higraph(nf: NormalForm, program: Optional[Program] = None,
                  palette_order: str = "paper", palette=PALETTE) -> HigraphModel:
    if palette_order not in PALETTE_ORDERS:
        raise ValueError(f"palette_order must be one of {PALETTE_ORDERS}")
    ncols = max(nf.columns, max(nf.outer))
    outer = set(nf.outer)
    places = [ArgumentPlace(j, Shade.BLACK if j in outer else Shade.GRAY, SharedColumn(j))
              for j in range(1, ncols + 1)]
    next_id = ncols + 1

    chains = []
    for ci, conj in enumerate(nf.conjuncts):
        arity = _predicate_arity(conj.predicate, program)
        chain = []
        for k in range(1, arity + 1):
            j = next((j for j, m in enumerate(conj.indices, 1) if m == k), None)
            if j is None:
                places.append(ArgumentPlace(next_id, Shade.GRAY, PrivateArg(ci, k)))
                chain.append(next_id)
                next_id += 1
            else:
                chain.append(j)
        chains.append(tuple(chain))

    counts = {}
    for conj in nf.conjuncts:
        counts[conj.predicate] = counts.get(conj.predicate, 0) + 1
    seen = {}
    labels = []
    for conj in nf.conjuncts:
        name = conj.predicate
        if counts[name] > 1:
            seen[name] = seen.get(name, 0) + 1
            name = name + str(seen[name]).translate(_SUPERSCRIPTS)
        labels.append(name)

    ranked = list(range(len(nf.conjuncts)))
    if palette_order == "paper":
        ranked.sort(key=lambda i: 0 if nf.conjuncts[i].predicate in BUILTINS else 1)
    colour_of = {ci: palette[rank % len(palette)] for rank, ci in enumerate(ranked)}

    orders = tuple(
        ArgumentOrder(labels[ci], chains[ci], colour_of[ci][1], colour_of[ci][0],
                      conj.predicate, ci)
        for ci, conj in enumerate(nf.conjuncts)
    )
    black = frozenset(p.id for p in places if p.shade is Shade.BLACK)
    contours = [Contour(nf.name, black, ContourKind.NEW_PREDICATE)]
    for o in orders:
        if len(o.places) == 1:
            contours.append(Contour(o.label, frozenset(o.places), ContourKind.UNARY_PREDICATE))

    model = HigraphModel(tuple(places), orders, tuple(contours), nf.name)
    touched = {pid for o in orders for pid in o.places}
    for p in places:
        if p.id not in touched:
            msg = (f"column {p.origin.index} of '{nf.name}' is not attached to any predicate; "
                   "the definition has an unbound introduced column")
            model.warnings.append(msg)
            warnings.warn(msg, HigraphWarning, stacklevel=2)
    return model


# -- layout -----------------------------------------------------------------

@dataclass
class PositionedModel:
    model: HigraphModel
    width: int
    height: int
    positions: dict
    edges: list  # (order, (x1, y1), (x2, y2))
    contours: list  # (contour, [(x, y), ...])
    labels: list  # (text, (x, y), colour)


def _hull(points) -> list:
    samples = []
    for x, y in points:
        for k in range(16):
            a = 2 * math.pi * k / 16
            samples.append((x + CONTOUR_INFLATION * math.cos(a),
                            y + CONTOUR_INFLATION * math.sin(a)))
    pts = np.array(samples)
    hull = ConvexHull(pts)
    return [(int(round(pts[i, 0])), int(round(pts[i, 1]))) for i in hull.vertices]


def layout(model: HigraphModel) -> PositionedModel:
    shared = [p for p in model.places if isinstance(p.origin, SharedColumn)]
    n = len(shared)
    radius = 60 * max(2, n)
    raw = {}
    for p in shared:
        theta = math.radians(90 - (p.origin.index - 1) * 360 / n)
        raw[p.id] = (radius * math.cos(theta), -radius * math.sin(theta))

    for o in model.orders:
        private = [pid for pid in o.places if pid not in raw]
        if not private:
            continue
        anchors = [raw[pid] for pid in o.places if pid in raw]
        if anchors:
            mx = sum(a[0] for a in anchors) / len(anchors)
            my = sum(a[1] for a in anchors) / len(anchors)
        else:
            mx = my = 0.0
        norm = math.hypot(mx, my)
        if norm < 1:
            a = math.radians(90 - 45 * o.conjunct)
            dx, dy = math.cos(a), -math.sin(a)
        else:
            dx, dy = mx / norm, my / norm
        for r, pid in enumerate(private, 1):
            raw[pid] = (mx + dx * 60 * r, my + dy * 60 * r)

    pad = MARGIN + CONTOUR_INFLATION
    xs = [x for x, _ in raw.values()]
    ys = [y for _, y in raw.values()]
    ox, oy = pad - min(xs), pad - min(ys)
    pos = {pid: (int(round(x + ox)), int(round(y + oy))) for pid, (x, y) in raw.items()}
    width = int(round(max(xs) - min(xs))) + 2 * pad
    height = int(round(max(ys) - min(ys))) + 2 * pad

    edges, labels = [], []
    for o in model.orders:
        for a, b in o.edges:
            (x1, y1), (x2, y2) = pos[a], pos[b]
            d = math.hypot(x2 - x1, y2 - y1) or 1.0
            ux, uy = (x2 - x1) / d, (y2 - y1) / d
            start = (int(round(x1 + ux * PLACE_RADIUS)), int(round(y1 + uy * PLACE_RADIUS)))
            end = (int(round(x2 - ux * (PLACE_RADIUS + 2))), int(round(y2 - uy * (PLACE_RADIUS + 2))))
            edges.append((o, start, end))
        if o.first_edge is not None:
            (x1, y1), (x2, y2) = pos[o.first_edge[0]], pos[o.first_edge[1]]
            d = math.hypot(x2 - x1, y2 - y1) or 1.0
            nx, ny = -(y2 - y1) / d, (x2 - x1) / d
            at = (int(round((x1 + x2) / 2 + nx * LABEL_OFFSET)),
                  int(round((y1 + y2) / 2 + ny * LABEL_OFFSET)))
            labels.append((o.label, at, o.colour))

    contours = []
    for c in model.contours:
        members = sorted(c.members)
        if not members:
            continue
        poly = _hull([pos[m] for m in members])
        contours.append((c, poly))
        top = min(poly, key=lambda p: (p[1], p[0]))
        colour = "#000000"
        if c.kind is ContourKind.UNARY_PREDICATE:
            colour = next(o.colour for o in model.orders
                          if o.label == c.label and len(o.places) == 1)
        labels.append((c.label, (top[0], top[1] - 4), colour))
    return PositionedModel(model, width, height, pos, edges, contours, labels)


# -- emitters ----------------------------------------------------------------

def emit_svg(positioned: PositionedModel) -> bytes:
    """SVG 1.1 document; element groups appear as places, edges, contours, labels."""
    m = positioned.model
    w, h = positioned.width, positioned.height
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f"<title>{escape(m.new_predicate_name)}</title>",
        "<defs>",
    ]
    colours = []
    for o in m.orders:
        if o.colour not in colours:
            colours.append(o.colour)
    for i, colour in enumerate(colours):
        out.append(f'<marker id="arrow{i}" viewBox="0 0 10 10" refX="9" refY="5" '
                   f'markerWidth="8" markerHeight="8" orient="auto">'
                   f'<polygon points="0,0 10,5 0,10" fill="{colour}"/></marker>')
    out.append("</defs>")

    out.append('<g id="places">')
    for p in m.places:
        x, y = positioned.positions[p.id]
        fill = BLACK_FILL if p.shade is Shade.BLACK else GRAY_FILL
        out.append(f'<circle id="place{p.id}" class="place {p.shade.value}" cx="{x}" cy="{y}" '
                   f'r="{PLACE_RADIUS}" fill="{fill}"/>')
    out.append("</g>")

    out.append('<g id="edges">')
    for o, (x1, y1), (x2, y2) in positioned.edges:
        marker = colours.index(o.colour)
        out.append(f'<path class="edge" data-order={quoteattr(o.label)} '
                   f'd="M {x1} {y1} L {x2} {y2}" stroke="{o.colour}" stroke-width="2" '
                   f'fill="none" marker-end="url(#arrow{marker})"/>')
    out.append("</g>")

    out.append('<g id="contours">')
    for c, poly in positioned.contours:
        d = "M " + " L ".join(f"{x} {y}" for x, y in poly) + " Z"
        out.append(f'<path class="contour {c.kind.value}" data-label={quoteattr(c.label)} '
                   f'd="{d}" fill="none" stroke="#444444" stroke-width="1.5"/>')
    out.append("</g>")

    out.append('<g id="labels">')
    for text, (x, y), colour in positioned.labels:
        out.append(f'<text x="{x}" y="{y}" fill="{colour}" font-family="sans-serif" '
                   f'font-size="12" text-anchor="middle">{escape(text)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(model: HigraphModel) -> str:
    """Graphviz digraph; the new-predicate contour is a cluster subgraph."""
    lines = [f"digraph {_dot_id(model.new_predicate_name)} {{",
             "  node [shape=point, style=filled, width=0.15];"]

    def node(p):
        colour = "black" if p.shade is Shade.BLACK else "gray"
        return f"p{p.id} [fillcolor={colour}, color={colour}];"

    unary = {}
    for c in model.contours:
        if c.kind is ContourKind.UNARY_PREDICATE:
            (pid,) = tuple(c.members)
            unary.setdefault(pid, []).append(c)

    counter = [0]

    def emit_place(p, indent):
        nested = unary.get(p.id, [])
        for c in nested:
            counter[0] += 1
            lines.append(f"{indent}subgraph cluster_unary{counter[0]} {{")
            indent += "  "
            lines.append(f"{indent}label={_dot_id(c.label)};")
        lines.append(f"{indent}{node(p)}")
        for _ in nested:
            indent = indent[:-2]
            lines.append(f"{indent}}}")

    new = model.new_predicate_contour
    lines.append("  subgraph cluster_new_predicate {")
    lines.append(f"    label={_dot_id(new.label)};")
    lines.append("    style=rounded;")
    for p in model.places:
        if p.id in new.members:
            emit_place(p, "    ")
    lines.append("  }")
    for p in model.places:
        if p.id not in new.members:
            emit_place(p, "  ")
    for o in model.orders:
        for i, (a, b) in enumerate(o.edges):
            attrs = [f'color="{o.colour}"']
            if i == 0:
                attrs.append(f"label={_dot_id(o.label)}")
                attrs.append(f'fontcolor="{o.colour}"')
            lines.append(f"  p{a} -> p{b} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def render(program: Program, name: str, fmt: str = "svg", palette_order: str = "paper"):
    """Normalize, build, lay out and emit one definition."""
    if name not in program.definitions:
        raise KeyError(f"no definition named '{name}'")
    nf = normalize_to_conjunction_of_makes(program.definitions[name], program)
    model = build_higraph(nf, program, palette_order)
    if fmt == "dot":
        return emit_dot(model)
    if fmt == "svg":
        return emit_svg(layout(model))
    raise ValueError(f"unknown format '{fmt}'")
