# coding: utf-8

# # Recursion with foldr and foldl
#
# Definitions may not refer to themselves, so every recursion goes through a
# fold. A fold relation F has three columns: a seed, a list and a result.
#
#     foldr(P, B):  F(y, [], z) if B(y, z)
#                   F(y, [x|xs], z) if F(y, xs, w) and P(x, w, z)
#     foldl(P, B):  F(y, [], z) if B(y, z)
#                   F(y, [x|xs], z) if P(x, y, w) and F(w, xs, z)

from combilog import compile_program, emit_prolog_text, parse_program, parse_query, solve
from combilog.cli import format_answers

program = parse_program("""
app <- foldr(cons, eq).
rapp <- foldl(cons, eq).
rev <- make[2,3](and(foldl(cons, eq), make[1,2,3](nil))).
nil([]).
""")

def ask(text):
    print(text)
    print(format_answers(solve(program, parse_query(text, program))))

# With cons as the step and eq as the base, foldr puts the list in front of the seed.

ask("?- app([c,d], [a,b], Z).")

# foldl pushes elements onto the seed one at a time, which reverses the list.

ask("?- rapp([c], [a,b], Z).")

# Fixing the seed to [] with a `nil` fact gives plain reverse.

ask("?- rev([a,b,c], R).")

# The list column must be bound. Asking the fold to invent lists is refused.

from combilog import UnsafeQuery

try:
    solve(program, parse_query("?- app(Y, X, [a,b]).", program))
except UnsafeQuery as exc:
    print("rejected:", exc)

# Each fold becomes a helper predicate with one base clause and one recursive clause.

print(emit_prolog_text(compile_program(program)))
