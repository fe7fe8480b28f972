# coding: utf-8

# # Drawing a conjunction of makes
#
# A definition shaped like make[...](and(make[...](p), ...)) can be drawn as a
# Higraph. Shared columns become places. Each conjunct becomes a coloured chain
# of edges through the places it touches.

import sys
from pathlib import Path

from combilog import build_higraph, emit_dot, emit_svg, layout, normalize_to_conjunction_of_makes
from combilog import parse_program

program = parse_program("""
siblings <- make[1,2](and(make[2,3,1](parent), make[3,2,1](parent), make[1,2,3](ineq))).
parent(p, a).
parent(p, b).
""")

nf = normalize_to_conjunction_of_makes(program.definitions["siblings"], program)
print(nf)

# Columns kept by the outer make are black. Column 3 (the parent) is gray.

model = build_higraph(nf, program)
for place in model.places:
    print(place.id, place.shade.value)

# The default "paper" palette order gives built-ins the first colours.
# Pass palette_order="conjunct" to colour strictly left to right.

for order in model.orders:
    print(f"{order.label:8} {order.colour_name:6} {order.edges}")

# Layout is fixed: places go on a circle starting at the top, and contours are
# inflated convex hulls. The output is the same on every run.

out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
(out / "siblings.svg").write_bytes(emit_svg(layout(model)))
(out / "siblings.dot").write_text(emit_dot(model))
print("wrote", out / "siblings.svg", "and", out / "siblings.dot")
