import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import random_relation, relations

from combilog.ast import And, Make, Or, PredRef, Program
from combilog.corpus import safe_pairs, unsafe_pairs
from combilog.engine import (
    EvalConfig, ModeAnalyzer, brute_force_oracle, eval_closed, lists_over, oracle_answers,
    safety_check, solve, unify,
)
from combilog.errors import (
    FoldListTooLong, NotFinitelyDenotable, SolutionLimitExceeded, UnsafeQuery,
)
from combilog.parser import parse_expr, parse_program, parse_query
from combilog.terms import Atom, ListTerm, Relation, Substitution, Var

A, B, C = Atom("a"), Atom("b"), Atom("c")


def L(*xs):
    return ListTerm(tuple(Atom(x) for x in xs))


def program_with(rel: Relation, name="q") -> Program:
    program = Program()
    program.add_facts(name, rel.tuples)
    return program


def project(rel: Relation, indices) -> set:
    return {tuple(row[i - 1] for i in indices) for row in rel.tuples}


# -- unification ---------------------------------------------------------------

def test_unify_binds_inside_lists():
    b = unify(ListTerm((Var("X"), B)), L("a", "b"), {})
    assert b == {"X": A}
    assert unify(L("a"), L("a", "b"), {}) is None


def test_unify_occurs_check():
    assert unify(Var("X"), ListTerm((Var("X"),)), {}) is None


# -- solve -----------------------------------------------------------------------

def test_head_query(head_program):
    answers = solve(head_program, parse_query("?- head([a,b], X).", head_program))
    assert answers == {Substitution({"X": A})}


def test_siblings_query_matches_direct_join(siblings_program):
    answers = solve(siblings_program, parse_query("?- siblings(X, Y).", siblings_program))
    got = {(s["X"], s["Y"]) for s in answers}
    parent = siblings_program.facts["parent"].tuples
    expected = {(x, y) for (z1, x) in parent for (z2, y) in parent if z1 == z2 and x != y}
    assert got == expected == {(A, B), (B, A)}


def test_builtin_queries():
    program = Program()
    assert solve(program, parse_query("?- eq(a, a).")) == {Substitution({})}
    assert solve(program, parse_query("?- eq(a, b).")) == set()
    assert solve(program, parse_query("?- ineq(a, b).")) == {Substitution({})}
    assert solve(program, parse_query("?- cons(H, T, [a,b]).")) == {
        Substitution({"H": A, "T": L("b")})}
    with pytest.raises(UnsafeQuery):
        solve(program, parse_query("?- ineq(X, Y)."))


def test_or_is_union():
    program = parse_program("u <- or(p, q).\np(a).\nq(b).\nq(a).")
    answers = solve(program, parse_query("?- u(X).", program))
    assert answers == {Substitution({"X": A}), Substitution({"X": B})}


def test_replication_make():
    program = parse_program("dup <- make[1,1](p).\np(a, b).\np(c, d).")
    assert eval_closed(program, PredRef("dup")) == Relation(2, [(A, A), (Atom("c"), Atom("c"))])


def test_introduced_column_bound_by_query():
    program = parse_program("p <- make[1,3](q).\nq(a).")
    answers = solve(program, parse_query("?- p(X, z).", program))
    assert answers == {Substitution({"X": A})}


# -- eval_closed ------------------------------------------------------------------

def test_eval_closed_swap():
    program = parse_program("e(a, b).\ne(b, c).")
    assert eval_closed(program, parse_expr("make[2,1](e)")) == Relation(2, [(B, A), (C, B)])


def test_eval_closed_and_idempotent():
    program = parse_program("e(a, b).\ne(b, c).")
    assert eval_closed(program, parse_expr("and(e, e)")) == program.facts["e"]


def test_eval_closed_rejects_introduction():
    program = parse_program("q(a).")
    with pytest.raises(NotFinitelyDenotable):
        eval_closed(program, parse_expr("make[1,2](q)"))


# -- safety ------------------------------------------------------------------------

def test_siblings_conjunct_order(siblings_program):
    body = siblings_program.definitions["siblings"].body
    from combilog.ast import flatten
    flat = flatten(body)
    plan = safety_check(siblings_program, flat)
    assert plan.output == (True, True)
    assert plan.order_for(flat.operand) == (0, 1, 2)


def test_ineq_first_is_reordered():
    program = parse_program(
        "s <- make[1,2](and(make[1,2,3](ineq), make[2,3,1](parent), make[3,2,1](parent))).\n"
        "parent(p, a).\nparent(p, b).")
    flat = program.definitions["s"].body
    plan = safety_check(program, flat)
    assert plan.order_for(flat.operand) == (1, 2, 0)
    answers = solve(program, parse_query("?- s(X, Y).", program))
    assert len(answers) == 2


def test_unsafe_ineq_projection():
    with pytest.raises(UnsafeQuery):
        safety_check(Program(), parse_expr("make[1,2](ineq)"))


def test_head_mode(head_program):
    q = parse_query("?- head([a,b], X).", head_program)
    assert safety_check(head_program, q).output == (True, True)
    with pytest.raises(UnsafeQuery):
        safety_check(head_program, parse_query("?- head(L, a).", head_program))


def test_mode_analyzer_cons_modes():
    analyzer = ModeAnalyzer(Program())
    cons = PredRef("cons")
    assert analyzer.analyze(cons, (True, True, False)) == (True, True, True)
    assert analyzer.analyze(cons, (False, False, True)) == (True, True, True)
    assert not analyzer.ok(cons, (True, False, False))


@pytest.mark.parametrize("pair", list(unsafe_pairs()), ids=lambda p: str(p[1].span.line))
def test_corpus_unsafe_queries_rejected(pair):
    entry, query = pair
    with pytest.raises(UnsafeQuery):
        solve(entry.program, query)


# -- oracle equivalence --------------------------------------------------------------

PAIRS = list(safe_pairs())


@pytest.mark.parametrize("pair", PAIRS, ids=[f"{e.name}:{q.predicate}{i}" for i, (e, q) in enumerate(PAIRS)])
def test_solve_matches_oracle_on_corpus(pair):
    entry, query = pair
    program = entry.program
    universe = entry.universe([query])
    assert solve(program, query) == oracle_answers(program, query, universe)


def test_oracle_relation_for_siblings(siblings_program):
    universe = {A, B, C, Atom("p"), Atom("q")}
    rel = brute_force_oracle(siblings_program, PredRef("siblings"), universe)
    assert rel == Relation(2, [(A, B), (B, A)])


# -- make algebra --------------------------------------------------------------------

def _check_identity(rel):
    program = program_with(rel)
    identity = Make(tuple(range(1, rel.arity + 1)), PredRef("q"))
    assert eval_closed(program, identity) == rel


def _check_composition(rel, sigma, tau):
    program = program_with(rel)
    lhs = eval_closed(program, Make(sigma, Make(tau, PredRef("q"))))
    composed = tuple(tau[s - 1] for s in sigma)
    rhs = eval_closed(program, Make(composed, PredRef("q")))
    assert lhs == rhs
    assert set(lhs.tuples) == project(rel, composed)


@settings(max_examples=150)
@given(relations(), st.randoms(use_true_random=False))
def test_make_laws_hypothesis(rel, rnd):
    _check_identity(rel)
    sigma = list(range(1, rel.arity + 1))
    tau = list(sigma)
    rnd.shuffle(sigma)
    rnd.shuffle(tau)
    _check_composition(rel, tuple(sigma), tuple(tau))


@settings(max_examples=150)
@given(relations(), st.data())
def test_projection_soundness(rel, data):
    n = rel.arity
    idx = tuple(data.draw(st.lists(st.integers(1, n), min_size=1, max_size=5)))
    program = program_with(rel)
    got = eval_closed(program, Make(idx, PredRef("q")))
    assert set(got.tuples) == project(rel, idx)


def test_make_composition_with_replication_and_exclusion():
    rng = random.Random(7)
    for _ in range(50):
        rel = random_relation(rng)
        n = rel.arity
        tau = tuple(rng.randint(1, n) for _ in range(rng.randint(1, 4)))
        sigma = tuple(rng.randint(1, len(tau)) for _ in range(rng.randint(1, 4)))
        _check_composition(rel, sigma, tau)


# -- and/or laws ------------------------------------------------------------------------

@settings(max_examples=60)
@given(relations(max_arity=3), relations(max_arity=3))
def test_and_or_laws(r1, r2):
    if r1.arity != r2.arity:
        r2 = Relation(r1.arity, [row[:1] * r1.arity for row in r2.tuples])
    program = Program()
    program.add_facts("p", r1.tuples)
    program.add_facts("q", r2.tuples)
    p, q = PredRef("p"), PredRef("q")
    both = eval_closed(program, And((p, q)))
    assert set(both.tuples) == set(r1.tuples) & set(r2.tuples)
    assert both == eval_closed(program, And((q, p)))
    either = eval_closed(program, Or((p, q)))
    assert set(either.tuples) == set(r1.tuples) | set(r2.tuples)
    assert either == eval_closed(program, Or((q, p)))


# -- folds ------------------------------------------------------------------------------

LISTS = sorted(lists_over([A, B], 3), key=lambda t: (len(t.elements), str(t)))


def test_foldr_append_all_pairs(append_program):
    assert len(LISTS) == 15
    for ys, xs in itertools.product(LISTS, LISTS):
        q = parse_query(f"?- app({ys}, {xs}, Z).", append_program)
        expected = ListTerm(xs.elements + ys.elements)
        assert solve(append_program, q) == {Substitution({"Z": expected})}


def test_foldr_append_membership_mode(append_program):
    candidates = sorted(lists_over([A, B], 3), key=str)
    ys, xs = L("a"), L("b", "a")
    hits = [zs for zs in candidates
            if solve(append_program, parse_query(f"?- app({ys}, {xs}, {zs}).", append_program))]
    assert hits == [L("b", "a", "a")]


def test_foldl_reverses_onto_seed():
    program = parse_program("rapp <- foldl(cons, eq).")
    q = parse_query("?- rapp([c], [a,b], Z).", program)
    assert solve(program, q) == {Substitution({"Z": L("b", "a", "c")})}


def test_fold_needs_bound_list(append_program):
    with pytest.raises(UnsafeQuery):
        solve(append_program, parse_query("?- app(Y, X, [a,b]).", append_program))


# -- limits -----------------------------------------------------------------------------

def test_solution_limit():
    program = parse_program("e(a).\ne(b).\ne(c).")
    with pytest.raises(SolutionLimitExceeded):
        solve(program, parse_query("?- e(X).", program), EvalConfig(max_solutions=2))


def test_fold_list_limit(append_program):
    q = parse_query("?- app([], [a,b,a], Z).", append_program)
    with pytest.raises(FoldListTooLong):
        solve(append_program, q, EvalConfig(max_fold_list_length=2))


def test_config_validation():
    with pytest.raises(ValueError):
        EvalConfig(max_solutions=0)
