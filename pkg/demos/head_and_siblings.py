# coding: utf-8

# # Two small Combilog programs
#
# Combilog definitions never mention variables. Instead, `make` rearranges the
# columns of a relation and `and`/`or` combine relations of equal width.
# Here we load two definitions, ask some queries and look at the generated Prolog.

from combilog import compile_program, emit_prolog_text, parse_program, parse_query, solve
from combilog.cli import format_answers

# `head` keeps columns 3 and 1 of cons(U, V, [U|V]), so head(L, X) holds when
# X is the first element of L.

program = parse_program("""
head <- make[3,1](cons).
siblings <- make[1,2](and(make[2,3,1](parent), make[3,2,1](parent), make[1,2,3](ineq))).

parent(p, a).
parent(p, b).
parent(q, c).
""")

print(format_answers(solve(program, parse_query("?- head([a,b], X).", program))))

# In `siblings` each conjunct is three columns wide. Column 3 is the shared
# parent, and the outer make keeps only the two children. The engine evaluates
# `ineq` last because it needs both arguments bound.

print(format_answers(solve(program, parse_query("?- siblings(X, Y).", program))))

# Both definitions translate to ordinary clauses. Variable names are
# assigned in order of first appearance, and `_` marks a variable used once.

print(emit_prolog_text(compile_program(program)))

# A query that would have to enumerate an infinite relation is rejected before
# evaluation starts.

from combilog import UnsafeQuery

try:
    solve(program, parse_query("?- ineq(X, b)."))
except UnsafeQuery as exc:
    print("rejected:", exc)
