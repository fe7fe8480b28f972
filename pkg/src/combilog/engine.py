"""Goal-directed evaluation of Combilog expressions over finite fact bases.

An expression is called with a tuple of argument terms (possibly
containing variables) and yields binding environments.  Conjunctions are
reordered greedily so that built-ins run only in a supported mode; the
same mode analysis backs :func:`safety_check`.

Fold semantics, with argument order ``F(seed, list, result)``::

    foldr(P, B)(y, [], z)     <- B(y, z)
    foldr(P, B)(y, [x|xs], z) <- foldr(P, B)(y, xs, w), P(x, w, z)
    foldl(P, B)(y, [], z)     <- B(y, z)
    foldl(P, B)(y, [x|xs], z) <- P(x, y, w), foldl(P, B)(w, xs, z)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .ast import And, Foldl, Foldr, Make, Or, PredRef, Program, arity_of
from .errors import (
    ArityMismatch,
    FoldListTooLong,
    NotFinitelyDenotable,
    SolutionLimitExceeded,
    UniverseTooLarge,
    UnknownPredicate,
    UnsafeQuery,
)
from .terms import Atom, ListTerm, Relation, Substitution, Var, is_ground, subterms, term_vars

# Longest list length the static fold analysis unrolls; the bound/free
# pattern of the recursive call stabilizes after at most two steps.
_FOLD_UNROLL = 3


@dataclass(frozen=True)
class EvalConfig:
    max_solutions: int = 10000
    max_fold_list_length: int = 1024

    def __post_init__(self):
        if self.max_solutions < 1 or self.max_fold_list_length < 1:
            raise ValueError("EvalConfig limits must be positive")


DEFAULT_CONFIG = EvalConfig()


# -- bindings -------------------------------------------------------------

def walk(term, bindings):
    while isinstance(term, Var) and term.name in bindings:
        term = bindings[term.name]
    return term


def resolve(term, bindings):
    term = walk(term, bindings)
    if isinstance(term, ListTerm):
        return ListTerm(tuple(resolve(e, bindings) for e in term.elements))
    return term


def _occurs(var, term, bindings):
    term = walk(term, bindings)
    if isinstance(term, Var):
        return term.name == var.name
    if isinstance(term, ListTerm):
        return any(_occurs(var, e, bindings) for e in term.elements)
    return False


def _unify_into(a, b, bindings) -> bool:
    a = walk(a, bindings)
    b = walk(b, bindings)
    if isinstance(a, Var) and isinstance(b, Var) and a.name == b.name:
        return True
    if isinstance(a, Var):
        if _occurs(a, b, bindings):
            return False
        bindings[a.name] = b
        return True
    if isinstance(b, Var):
        if _occurs(b, a, bindings):
            return False
        bindings[b.name] = a
        return True
    if isinstance(a, ListTerm) and isinstance(b, ListTerm):
        if len(a.elements) != len(b.elements):
            return False
        return all(_unify_into(x, y, bindings) for x, y in zip(a.elements, b.elements))
    return a == b


def unify(a, b, bindings) -> Optional[dict]:
    """Return extended bindings unifying ``a`` and ``b``, or None."""
    new = dict(bindings)
    return new if _unify_into(a, b, new) else None


def unify_all(pairs, bindings) -> Optional[dict]:
    new = dict(bindings)
    for a, b in pairs:
        if not _unify_into(a, b, new):
            return None
    return new


# -- mode analysis ----------------------------------------------------------

class _Stuck(Exception):
    def __init__(self, expr, unresolved):
        super().__init__(expr, unresolved)
        self.expr = expr
        self.unresolved = tuple(unresolved)


def _or(a, b):
    return tuple(x or y for x, y in zip(a, b))


def _and(a, b):
    return tuple(x and y for x, y in zip(a, b))


@dataclass
class ModePlan:
    """Result of a successful safety check.

    ``orders`` lists, for every conjunction visited, the bound pattern it
    was entered with and the chosen left-to-right conjunct order.
    """

    input: tuple
    output: tuple
    orders: list = field(default_factory=list)

    def order_for(self, node, bound=None) -> tuple:
        for n, b, order in self.orders:
            if n is node and (bound is None or b == tuple(bound)):
                return order
        raise KeyError(node)


class ModeAnalyzer:
    """Computes which argument positions are ground after a call succeeds."""

    def __init__(self, program: Program):
        self.program = program
        self._cache = {}
        self._arity = {}
        self._keep = []
        self.trace = None

    def arity(self, expr) -> int:
        key = id(expr)
        if key not in self._arity:
            self._arity[key] = arity_of(expr, self.program)
            self._keep.append(expr)
        return self._arity[key]

    def analyze(self, expr, bound: tuple) -> tuple:
        bound = tuple(bound)
        key = (id(expr), bound)
        hit = self._cache.get(key)
        if hit is not None and self.trace is None:
            if isinstance(hit, _Stuck):
                raise hit
            return hit[0]
        try:
            out = self._analyze(expr, bound)
        except _Stuck as exc:
            self._cache[key] = exc
            self._keep.append(expr)
            raise
        self._cache[key] = (out,)
        self._keep.append(expr)
        return out

    def ok(self, expr, bound) -> bool:
        try:
            self.analyze(expr, bound)
            return True
        except _Stuck:
            return False

    def and_order(self, node: And, bound: tuple):
        """Greedy plan: repeatedly take the leftmost runnable conjunct."""
        remaining = list(range(len(node.operands)))
        current = tuple(bound)
        order = []
        while remaining:
            for idx in remaining:
                try:
                    out = self.analyze(node.operands[idx], current)
                except _Stuck:
                    continue
                order.append(idx)
                remaining.remove(idx)
                current = _or(current, out)
                break
            else:
                # re-raise the reason of the first blocked conjunct
                self.analyze(node.operands[remaining[0]], current)
        return tuple(order), current

    def _analyze(self, expr, bound):
        if isinstance(expr, PredRef):
            name = expr.name
            if name in self.program.definitions:
                return self.analyze(self.program.definitions[name].body, bound)
            if name in self.program.facts:
                return (True,) * self.program.facts[name].arity
            if name == "cons":
                if bound[2] or (bound[0] and bound[1]):
                    return (True, True, True)
                raise _Stuck(expr, [i for i, b in enumerate(bound) if not b])
            if name == "eq":
                if bound[0] or bound[1]:
                    return (True, True)
                raise _Stuck(expr, [0, 1])
            if name == "ineq":
                if bound[0] and bound[1]:
                    return (True, True)
                raise _Stuck(expr, [i for i, b in enumerate(bound) if not b])
            raise UnknownPredicate(name, expr.span)
        if isinstance(expr, Make):
            n = self.arity(expr.operand)
            mu = expr.indices
            qbound = tuple(any(bound[i] for i, m in enumerate(mu) if m == k) for k in range(1, n + 1))
            qout = self.analyze(expr.operand, qbound)
            return tuple(
                qout[m - 1] if m <= n else any(bound[j] for j, mj in enumerate(mu) if mj == m)
                for m in mu
            )
        if isinstance(expr, And):
            order, out = self.and_order(expr, bound)
            if self.trace is not None:
                self.trace.append((expr, bound, order))
            return out
        if isinstance(expr, Or):
            outs = [self.analyze(op, bound) for op in expr.operands]
            out = outs[0]
            for o in outs[1:]:
                out = _and(out, o)
            return out
        if isinstance(expr, (Foldr, Foldl)):
            if not bound[1]:
                raise _Stuck(expr, [1])
            out = None
            for n in range(_FOLD_UNROLL + 1):
                o = self._fold(expr, n, bound[0], bound[2])
                out = o if out is None else _and(out, o)
            return out
        raise TypeError(f"not an expression: {expr!r}")

    def _fold(self, expr, n, by, bz):
        if n == 0:
            o = self.analyze(expr.base, (by, bz))
            return (o[0], True, o[1])
        if isinstance(expr, Foldr):
            inner = self._fold(expr, n - 1, by, False)
            p = self.analyze(expr.step, (True, inner[2], bz))
            return (inner[0], True, p[2])
        p = self.analyze(expr.step, (True, by, False))
        rec = self._fold(expr, n - 1, p[2], bz)
        return (p[1], True, rec[2])


def _describe(stuck: _Stuck) -> str:
    cols = ", ".join(str(i + 1) for i in stuck.unresolved)
    from .ast import pretty_print

    return f"cannot run {pretty_print(stuck.expr)} with argument(s) {cols} unbound"


def _query_target(program: Program, query):
    if program.kind(query.predicate) is None:
        raise UnknownPredicate(query.predicate, query.span)
    expr = PredRef(query.predicate)
    arity = arity_of(expr, program)
    if arity != len(query.arguments):
        raise ArityMismatch(query.predicate, arity, len(query.arguments), query.span)
    return expr


def _named_vars(term) -> list:
    return [v.name for v in term_vars(term) if not v.name.startswith("_")]


def safety_check(program: Program, target, bound=None) -> ModePlan:
    """Check that ``target`` (a Query or an Expr) can run to ground answers.

    For an expression, ``bound`` gives the input pattern (default: all
    free) and every column must come out bound.  For a query, the bound
    pattern is read off the ground arguments and every position holding a
    named variable must come out bound.
    """
    from .parser import Query

    analyzer = ModeAnalyzer(program)
    analyzer.trace = []
    if isinstance(target, Query):
        expr = _query_target(program, target)
        bound = tuple(is_ground(a) for a in target.arguments)
        required = tuple(bool(_named_vars(a)) for a in target.arguments)
    else:
        expr = target
        arity = arity_of(expr, program)
        bound = tuple(bound) if bound is not None else (False,) * arity
        required = (True,) * arity
    try:
        out = analyzer.analyze(expr, bound)
    except _Stuck as stuck:
        raise UnsafeQuery(_describe(stuck), stuck.expr, stuck.unresolved) from None
    missing = [i for i, (r, o) in enumerate(zip(required, out)) if r and not o]
    if missing:
        cols = ", ".join(str(i + 1) for i in missing)
        raise UnsafeQuery(f"argument(s) {cols} would be left unbound (infinite answer set)",
                          expr, missing)
    return ModePlan(bound, out, analyzer.trace)


# -- solver ------------------------------------------------------------------

class Solver:
    def __init__(self, program: Program, config: EvalConfig = DEFAULT_CONFIG):
        self.program = program
        self.config = config
        self.modes = ModeAnalyzer(program)
        self._fresh = itertools.count(1)

    def fresh(self) -> Var:
        return Var(f"#{next(self._fresh)}")

    def _bound(self, args, b) -> tuple:
        return tuple(is_ground(resolve(a, b)) for a in args)

    def solve(self, expr, args, b):
        if isinstance(expr, PredRef):
            yield from self._pred(expr, args, b)
        elif isinstance(expr, Make):
            yield from self._make(expr, args, b)
        elif isinstance(expr, And):
            try:
                order, _ = self.modes.and_order(expr, self._bound(args, b))
            except _Stuck as stuck:
                raise UnsafeQuery(_describe(stuck), stuck.expr, stuck.unresolved) from None
            yield from self._conj([expr.operands[i] for i in order], args, b)
        elif isinstance(expr, Or):
            for op in expr.operands:
                yield from self.solve(op, args, b)
        elif isinstance(expr, (Foldr, Foldl)):
            yield from self._fold_entry(expr, args, b)
        else:
            raise TypeError(f"not an expression: {expr!r}")

    def _conj(self, ops, args, b):
        if not ops:
            yield b
            return
        for b1 in self.solve(ops[0], args, b):
            yield from self._conj(ops[1:], args, b1)

    def _pred(self, expr, args, b):
        name = expr.name
        program = self.program
        if name in program.definitions:
            yield from self.solve(program.definitions[name].body, args, b)
            return
        if name in program.facts:
            for row in program.facts[name].tuples:
                b1 = unify_all(zip(args, row), b)
                if b1 is not None:
                    yield b1
            return
        vals = [resolve(a, b) for a in args]
        ground = [is_ground(v) for v in vals]
        if name == "cons":
            head, tail, whole = vals
            if ground[2]:
                if isinstance(whole, ListTerm) and whole.elements:
                    b1 = unify_all([(head, whole.elements[0]),
                                    (tail, ListTerm(whole.elements[1:]))], b)
                    if b1 is not None:
                        yield b1
            elif ground[0] and ground[1]:
                if isinstance(tail, ListTerm):
                    b1 = unify(whole, ListTerm((head,) + tail.elements), b)
                    if b1 is not None:
                        yield b1
            else:
                raise UnsafeQuery(f"cons called with unsupported mode {_mode_str(ground)}", expr)
        elif name == "eq":
            if not (ground[0] or ground[1]):
                raise UnsafeQuery("eq called with both arguments unbound", expr)
            b1 = unify(vals[0], vals[1], b)
            if b1 is not None:
                yield b1
        elif name == "ineq":
            if not (ground[0] and ground[1]):
                raise UnsafeQuery("ineq needs both arguments bound", expr)
            if vals[0] != vals[1]:
                yield b
        else:
            raise UnknownPredicate(name, expr.span)

    def _make(self, expr, args, b):
        n = self.modes.arity(expr.operand)
        slots = {}
        pairs = []
        for m, arg in zip(expr.indices, args):
            if m in slots:
                pairs.append((slots[m], arg))
            else:
                slots[m] = arg
        b1 = unify_all(pairs, b) if pairs else b
        if b1 is None:
            return
        operand_args = tuple(slots[k] if k in slots else self.fresh() for k in range(1, n + 1))
        yield from self.solve(expr.operand, operand_args, b1)

    def _fold_entry(self, expr, args, b):
        seed, lst, result = args
        lst = resolve(lst, b)
        if not is_ground(lst):
            raise UnsafeQuery("fold list argument must be bound", expr, (1,))
        if not isinstance(lst, ListTerm):
            return
        if len(lst.elements) > self.config.max_fold_list_length:
            raise FoldListTooLong(
                f"fold over a list of length {len(lst.elements)} exceeds "
                f"max_fold_list_length={self.config.max_fold_list_length}")
        if isinstance(expr, Foldr):
            yield from self._foldr(expr, seed, lst.elements, result, b)
        else:
            yield from self._foldl(expr, seed, lst.elements, result, b)

    def _foldr(self, expr, seed, elements, result, b):
        if not elements:
            yield from self.solve(expr.base, (seed, result), b)
            return
        w = self.fresh()
        for b1 in self._foldr(expr, seed, elements[1:], w, b):
            yield from self.solve(expr.step, (elements[0], w, result), b1)

    def _foldl(self, expr, seed, elements, result, b):
        if not elements:
            yield from self.solve(expr.base, (seed, result), b)
            return
        w = self.fresh()
        for b1 in self.solve(expr.step, (elements[0], seed, w), b):
            yield from self._foldl(expr, w, elements[1:], result, b1)


def _mode_str(ground) -> str:
    return "(" + ",".join("Bound" if g else "Free" for g in ground) + ")"


def solve(program: Program, query, config: EvalConfig = DEFAULT_CONFIG) -> set:
    """Return the set of answer substitutions for ``query``.

    Raises UnsafeQuery when no conjunct ordering runs every built-in and
    fold in a supported mode, or when an answer would stay non-ground.
    """
    safety_check(program, query)
    expr = _query_target(program, query)
    names = sorted({n for a in query.arguments for n in _named_vars(a)})
    solver = Solver(program, config)
    answers = set()
    for b in solver.solve(expr, query.arguments, {}):
        theta = {}
        for name in names:
            value = resolve(Var(name), b)
            if not is_ground(value):
                raise UnsafeQuery(f"variable {name} left unbound", expr)
            theta[name] = value
        answers.add(Substitution(theta))
        if len(answers) > config.max_solutions:
            raise SolutionLimitExceeded(
                f"more than max_solutions={config.max_solutions} answers")
    return answers


def eval_closed(program: Program, expr, config: EvalConfig = DEFAULT_CONFIG) -> Relation:
    """Materialize the full denotation of a finitely denotable expression."""
    arity = arity_of(expr, program)
    try:
        safety_check(program, expr)
    except UnsafeQuery as exc:
        raise NotFinitelyDenotable(expr, str(exc)) from None
    solver = Solver(program, config)
    args = tuple(Var(f"C{i}") for i in range(1, arity + 1))
    rows = set()
    for b in solver.solve(expr, args, {}):
        row = tuple(resolve(a, b) for a in args)
        if not all(is_ground(t) for t in row):
            raise NotFinitelyDenotable(expr, "non-ground answer")
        rows.add(row)
        if len(rows) > config.max_solutions:
            raise SolutionLimitExceeded(
                f"more than max_solutions={config.max_solutions} tuples")
    return Relation(arity, rows)


# -- brute-force oracle -------------------------------------------------------

class BruteForceOracle:
    """Decides membership in a denotation by direct enumeration.

    Existential positions (projected-away operand columns, fold
    intermediates) range over ``universe``; nothing is shared with the
    goal-directed solver.
    """

    def __init__(self, program: Program, universe, max_candidates: int = 5_000_000):
        self.program = program
        self.universe = sorted(set(universe), key=_universe_key)
        self.max_candidates = max_candidates
        self._memo = {}
        self._keep = []

    def _product(self, count):
        size = len(self.universe) ** count
        if size > self.max_candidates:
            raise UniverseTooLarge(
                f"{len(self.universe)}^{count} = {size} candidates exceeds {self.max_candidates}")
        return itertools.product(self.universe, repeat=count)

    def holds(self, expr, row: tuple) -> bool:
        key = (id(expr), row)
        if key in self._memo:
            return self._memo[key]
        self._keep.append(expr)
        result = self._holds(expr, row)
        self._memo[key] = result
        return result

    def _holds(self, expr, row):
        program = self.program
        if isinstance(expr, PredRef):
            name = expr.name
            if name in program.definitions:
                return self.holds(program.definitions[name].body, row)
            if name in program.facts:
                return row in program.facts[name].tuples
            if name == "cons":
                u, v, lst = row
                return (isinstance(lst, ListTerm) and len(lst.elements) > 0
                        and lst.elements[0] == u and ListTerm(lst.elements[1:]) == v)
            if name == "eq":
                return row[0] == row[1]
            if name == "ineq":
                return row[0] != row[1]
            raise UnknownPredicate(name)
        if isinstance(expr, Make):
            n = arity_of(expr.operand, program)
            fixed = {}
            for m, t in zip(expr.indices, row):
                if fixed.setdefault(m, t) != t:
                    return False
            free = [k for k in range(1, n + 1) if k not in fixed]
            for values in self._product(len(free)):
                xs = dict(fixed)
                xs.update(zip(free, values))
                if self.holds(expr.operand, tuple(xs[k] for k in range(1, n + 1))):
                    return True
            return False
        if isinstance(expr, And):
            return all(self.holds(op, row) for op in expr.operands)
        if isinstance(expr, Or):
            return any(self.holds(op, row) for op in expr.operands)
        if isinstance(expr, (Foldr, Foldl)):
            seed, lst, result = row
            if not isinstance(lst, ListTerm):
                return False
            if not lst.elements:
                return self.holds(expr.base, (seed, result))
            x, rest = lst.elements[0], ListTerm(lst.elements[1:])
            for w in self.universe:
                if isinstance(expr, Foldr):
                    if self.holds(expr.step, (x, w, result)) and self.holds(expr, (seed, rest, w)):
                        return True
                elif self.holds(expr.step, (x, seed, w)) and self.holds(expr, (w, rest, result)):
                    return True
            return False
        raise TypeError(f"not an expression: {expr!r}")

    def relation(self, expr) -> Relation:
        arity = arity_of(expr, self.program)
        rows = [row for row in self._product(arity) if self.holds(expr, row)]
        return Relation(arity, rows)

    def answers(self, query) -> set:
        """Answers to ``query`` with every variable ranging over the universe."""
        expr = _query_target(self.program, query)
        variables = []
        for arg in query.arguments:
            for v in term_vars(arg):
                if v.name not in variables:
                    variables.append(v.name)
        out = set()
        for values in self._product(len(variables)):
            env = dict(zip(variables, values))
            row = tuple(resolve(a, env) for a in query.arguments)
            if self.holds(expr, row):
                out.add(Substitution({k: v for k, v in env.items() if not k.startswith("_")}))
        return out


def _universe_key(term):
    from .terms import term_sort_key

    return term_sort_key(term)


def brute_force_oracle(program: Program, expr, universe, config: EvalConfig = DEFAULT_CONFIG,
                       max_candidates: int = 5_000_000) -> Relation:
    """Denotation of ``expr`` restricted to tuples over ``universe``."""
    rel = BruteForceOracle(program, universe, max_candidates).relation(expr)
    if len(rel) > config.max_solutions:
        raise SolutionLimitExceeded(f"oracle produced {len(rel)} tuples")
    return rel


def oracle_answers(program: Program, query, universe, max_candidates: int = 5_000_000) -> set:
    return BruteForceOracle(program, universe, max_candidates).answers(query)


def lists_over(atoms, max_length: int) -> set:
    """All lists of length <= max_length with elements drawn from ``atoms``."""
    atoms = sorted(set(atoms), key=_universe_key)
    out = set()
    for n in range(max_length + 1):
        for combo in itertools.product(atoms, repeat=n):
            out.add(ListTerm(combo))
    return out


def herbrand_universe(program: Program, extra_terms=(), list_atoms=None, max_list_length=0) -> set:
    """Constants of the fact base and ``extra_terms`` (with all subterms),
    plus lists over ``list_atoms`` up to ``max_list_length``."""
    out = set()
    for rel in program.facts.values():
        for row in rel.tuples:
            for t in row:
                out.update(subterms(t))
    for t in extra_terms:
        out.update(s for s in subterms(t) if is_ground(s))
    if list_atoms is None:
        list_atoms = [t for t in out if isinstance(t, Atom)]
    if max_list_length:
        out |= lists_over(list_atoms, max_list_length)
    return out
