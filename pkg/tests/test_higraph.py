import math
import random
import re
import warnings

import pytest

from combilog.ast import Definition, PredRef
from combilog.errors import NotDiagrammable
from combilog.higraph import (
    PALETTE, ContourKind, Conjunct, HigraphWarning, NormalForm, PrivateArg, Shade,
    SharedColumn, build_higraph, emit_dot, emit_svg, layout, normalize_to_conjunction_of_makes,
    render,
)
from combilog.parser import parse_program

RED, GREEN, BLUE = (hexcode for _, hexcode in PALETTE[:3])


def siblings_model(program, palette_order="paper"):
    nf = normalize_to_conjunction_of_makes(program.definitions["siblings"], program)
    return build_higraph(nf, program, palette_order)


# -- normalization -----------------------------------------------------------

def test_normalize_siblings(siblings_program):
    nf = normalize_to_conjunction_of_makes(siblings_program.definitions["siblings"])
    assert nf.outer == (1, 2)
    assert nf.conjuncts == (
        Conjunct((2, 3, 1), "parent"), Conjunct((3, 2, 1), "parent"), Conjunct((1, 2, 3), "ineq"))


def test_normalize_head(head_program):
    nf = normalize_to_conjunction_of_makes(head_program.definitions["head"], head_program)
    assert nf.outer == (3, 1)
    assert nf.conjuncts == (Conjunct((1, 2, 3), "cons"),)


def test_normalize_bare_predicate():
    program = parse_program("e(a, b).\nf <- e.")
    nf = normalize_to_conjunction_of_makes(program.definitions["f"], program)
    assert nf == NormalForm("f", (1, 2), (Conjunct((1, 2), "e"),))


@pytest.mark.parametrize("body", [
    "or(p, q)", "foldr(cons, eq)", "make[1,2](make[2,1](p))", "and(p, or(p, q))",
])
def test_normalize_rejects(body):
    program = parse_program(f"p(a, b).\nq(a, b).\nd <- {body}.")
    with pytest.raises(NotDiagrammable):
        normalize_to_conjunction_of_makes(program.definitions["d"], program)


# -- model ----------------------------------------------------------------------

def test_siblings_structure(siblings_program):
    m = siblings_model(siblings_program)
    assert len(m.places) == 3
    assert all(isinstance(p.origin, SharedColumn) for p in m.places)
    assert m.black == {1, 2}
    assert m.place(3).shade is Shade.GRAY
    orders = {o.label: o for o in m.orders}
    assert set(orders) == {"parent¹", "parent²", "ineq"}
    assert orders["parent¹"].edges == ((3, 1),)
    assert orders["parent²"].edges == ((3, 2),)
    assert orders["ineq"].edges == ((1, 2),)
    assert (orders["ineq"].colour, orders["parent¹"].colour, orders["parent²"].colour) == (
        RED, GREEN, BLUE)
    (contour,) = m.contours
    assert contour.kind is ContourKind.NEW_PREDICATE
    assert contour.members == {1, 2} and contour.label == "siblings"


def test_conjunct_palette_order(siblings_program):
    m = siblings_model(siblings_program, "conjunct")
    assert [o.colour for o in m.orders] == [RED, GREEN, BLUE]


def test_head_structure(head_program):
    nf = normalize_to_conjunction_of_makes(head_program.definitions["head"], head_program)
    m = build_higraph(nf, head_program)
    assert len(m.black) == 2 and len(m.places) == 3
    gray = [p for p in m.places if p.shade is Shade.GRAY]
    assert len(gray) == 1
    (order,) = m.orders
    assert order.label == "cons" and len(order.places) == 3 and len(order.edges) == 2
    assert m.new_predicate_contour.members == m.black


def test_private_argument_places():
    program = parse_program("e(a, b).\nu(a).\nd <- make[1](and(make[1](e), make[1](u))).")
    nf = normalize_to_conjunction_of_makes(program.definitions["d"], program)
    m = build_higraph(nf, program)
    private = [p for p in m.places if isinstance(p.origin, PrivateArg)]
    assert len(private) == 1 and private[0].shade is Shade.GRAY
    unary = [c for c in m.contours if c.kind is ContourKind.UNARY_PREDICATE]
    assert len(unary) == 1 and unary[0].members == {1}
    assert next(o for o in m.orders if o.predicate == "u").edges == ()


def test_untouched_column_warns():
    program = parse_program("u(a).")
    nf = NormalForm("d", (1, 2), (Conjunct((1, 2), "u"),))
    with pytest.warns(HigraphWarning):
        m = build_higraph(nf, program)
    assert m.warnings


def _random_nf(rng):
    arities = {"p": 1, "q": 2, "r": 3}
    width = rng.randint(1, 4)
    conjuncts = []
    for _ in range(rng.randint(1, 4)):
        name = rng.choice(sorted(arities))
        idx = tuple(rng.randint(1, arities[name] + 1) for _ in range(width))
        conjuncts.append(Conjunct(idx, name))
    outer = tuple(rng.randint(1, width) for _ in range(rng.randint(1, width)))
    return NormalForm("n", outer, tuple(conjuncts))


def test_model_invariants_on_random_forms():
    program = parse_program("p(a).\nq(a, b).\nr(a, b, c).")
    arities = {"p": 1, "q": 2, "r": 3}
    rng = random.Random(11)
    for _ in range(200):
        nf = _random_nf(rng)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HigraphWarning)
            m = build_higraph(nf, program)
        ids = [p.id for p in m.places]
        assert len(ids) == len(set(ids))
        assert len(m.edges) == sum(arities[c.predicate] - 1 for c in nf.conjuncts)
        assert m.black == set(nf.outer)
        assert sum(c.kind is ContourKind.NEW_PREDICATE for c in m.contours) == 1
        assert sum(c.kind is ContourKind.UNARY_PREDICATE for c in m.contours) == sum(
            arities[c.predicate] == 1 for c in nf.conjuncts)
        colours = [o.colour for o in m.orders]
        assert len(set(colours)) == len(colours)
        for p in m.places:
            if isinstance(p.origin, PrivateArg):
                assert p.shade is Shade.GRAY
                assert sum(p.id in o.places for o in m.orders) == 1
        for o in m.orders:
            assert set(o.places) <= set(ids)


# -- layout and emission --------------------------------------------------------------

def test_layout_angles(siblings_program):
    pm = layout(siblings_model(siblings_program))
    cx = sum(x for x, _ in pm.positions.values()) / 3
    cy = sum(y for _, y in pm.positions.values()) / 3
    angles = []
    for pid in (1, 2, 3):
        x, y = pm.positions[pid]
        angles.append(round(math.degrees(math.atan2(cy - y, x - cx))))
    assert angles == [90, -30, -150]
    radius = math.hypot(pm.positions[1][0] - cx, pm.positions[1][1] - cy)
    assert abs(radius - 180) <= 1


def test_layout_coordinates_are_integers(siblings_program):
    pm = layout(siblings_model(siblings_program))
    for x, y in pm.positions.values():
        assert isinstance(x, int) and isinstance(y, int)
    for _, poly in pm.contours:
        assert all(isinstance(v, int) for pt in poly for v in pt)


def test_layout_deterministic(siblings_program):
    a = layout(siblings_model(siblings_program))
    b = layout(siblings_model(siblings_program))
    assert a.positions == b.positions and a.contours == b.contours


def test_svg_structure(siblings_program):
    svg = render(siblings_program, "siblings", "svg").decode()
    circles = re.findall(r"<circle [^>]*>", svg)
    assert len(circles) == 3
    assert sum('fill="#000000"' in c for c in circles) == 2
    edges = re.findall(r'<path class="edge"[^>]*stroke="(#[0-9a-f]{6})"', svg)
    assert sorted(edges) == sorted([RED, GREEN, BLUE])
    assert len(re.findall(r'<path class="contour', svg)) == 1
    order = [svg.index(f'<g id="{g}">') for g in ("places", "edges", "contours", "labels")]
    assert order == sorted(order)


def test_dot_structure(siblings_program):
    dot = render(siblings_program, "siblings", "dot")
    cluster = dot.split("subgraph cluster_new_predicate {", 1)[1].split("}", 1)[0]
    assert set(re.findall(r"p(\d+) \[fillcolor=black", cluster)) == {"1", "2"}
    assert "fillcolor=gray" not in cluster
    assert len(re.findall(r"->", dot)) == 3
    assert 'label="ineq"' in dot


def test_single_unary_conjunct():
    program = parse_program("u(a).\nd <- u.")
    svg = render(program, "d", "svg").decode()
    assert len(re.findall(r"<circle ", svg)) == 1
    assert len(re.findall(r'<path class="edge"', svg)) == 0
    assert len(re.findall(r'<path class="contour', svg)) == 2
    dot = render(program, "d", "dot")
    assert dot.count("[fillcolor=") == 1 and "->" not in dot
    assert dot.count("subgraph cluster_") == 2


def test_render_is_byte_identical(siblings_program):
    assert render(siblings_program, "siblings", "svg") == render(siblings_program, "siblings", "svg")
    assert render(siblings_program, "siblings", "dot") == render(siblings_program, "siblings", "dot")


def test_emitters_accept_model_directly(siblings_program):
    m = siblings_model(siblings_program)
    assert emit_svg(layout(m)).startswith(b"<?xml")
    assert emit_dot(m).startswith('digraph "siblings"')


def test_render_unknown_definition(siblings_program):
    with pytest.raises(KeyError):
        render(siblings_program, "nope")


def test_normalize_needs_program_for_bare_predicates():
    with pytest.raises(ValueError):
        normalize_to_conjunction_of_makes(Definition("d", PredRef("e")))
