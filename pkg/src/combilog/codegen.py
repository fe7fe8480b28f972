"""Translation of Combilog definitions into Prolog clauses.

Each definition becomes one clause per disjunct.  ``make`` is compiled
away by variable plumbing: selected operand positions reuse the caller's
variables, unselected ones get fresh variables that end up printed as
``_``.  Folds become auxiliary predicates named ``<def>__fold<k>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .ast import And, Definition, Foldl, Foldr, Make, Or, PredRef, Program, arity_of
from .engine import ModeAnalyzer, _Stuck, _or
from .errors import NameCollision
from .terms import ListTerm, Var

PRELUDE = "cons(U, V, [U|V])."


@dataclass(frozen=True)
class Cons:
    """Prolog list cell ``[head|tail]``; only appears in generated clauses."""

    head: object
    tail: object

    def __str__(self):
        return f"[{self.head}|{self.tail}]"


@dataclass(frozen=True)
class Goal:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class PrologClause:
    head: Goal
    body: tuple = ()
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))


@dataclass
class CodegenOutput:
    clauses: list = field(default_factory=list)
    auxiliary_names: list = field(default_factory=list)

    def extend(self, other: "CodegenOutput") -> None:
        self.clauses.extend(other.clauses)
        self.auxiliary_names.extend(other.auxiliary_names)


PRELUDE_CLAUSE = PrologClause(
    Goal("cons", (Var("U"), Var("V"), Cons(Var("U"), Var("V")))), (), source="prelude")

_INFIX = {"eq": "=", "ineq": "\\="}


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, v):
        while self.parent.get(v, v) != v:
            v = self.parent[v]
        return v

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the older (smaller-numbered) variable as representative
            if _var_index(rb) < _var_index(ra):
                ra, rb = rb, ra
            self.parent[rb] = ra


def _var_index(v: Var) -> int:
    return int(v.name[1:])


class _Translator:
    def __init__(self, program: Program, definition: Definition, taken: set):
        self.program = program
        self.definition = definition
        self.modes = ModeAnalyzer(program)
        self.taken = taken
        self._vars = itertools.count(1)
        self._folds = itertools.count(1)
        self.aux_clauses = []
        self.aux_names = []

    def var(self) -> Var:
        return Var(f"T{next(self._vars)}")

    def order(self, node: And, bound: tuple):
        """Greedy conjunct order; falls back to source order when stuck."""
        remaining = list(range(len(node.operands)))
        current = tuple(bound)
        order, patterns = [], []
        while remaining:
            for idx in remaining:
                try:
                    out = self.modes.analyze(node.operands[idx], current)
                except _Stuck:
                    continue
                break
            else:
                idx = remaining[0]
                out = (True,) * len(current)
            order.append(idx)
            patterns.append(current)
            remaining.remove(idx)
            current = _or(current, out)
        return order, patterns

    def translate(self, expr, args: tuple, bound: tuple) -> list:
        """Return alternatives as (goals, merges) pairs."""
        if isinstance(expr, PredRef):
            name = expr.name
            if name in _INFIX and name not in self.program.definitions:
                return [([Goal(_INFIX[name], args)], [])]
            return [([Goal(name, args)], [])]
        if isinstance(expr, Make):
            n = arity_of(expr.operand, self.program)
            slots, merges = {}, []
            for m, arg in zip(expr.indices, args):
                if m in slots:
                    merges.append((slots[m], arg))
                else:
                    slots[m] = arg
            operand_args = tuple(slots[k] if k in slots else self.var() for k in range(1, n + 1))
            qbound = tuple(any(bound[i] for i, m in enumerate(expr.indices) if m == k)
                           for k in range(1, n + 1))
            return [(goals, merges + inner)
                    for goals, inner in self.translate(expr.operand, operand_args, qbound)]
        if isinstance(expr, And):
            order, patterns = self.order(expr, bound)
            alts = [([], [])]
            for idx, pattern in zip(order, patterns):
                sub = self.translate(expr.operands[idx], args, pattern)
                alts = [(g1 + g2, m1 + m2) for g1, m1 in alts for g2, m2 in sub]
            return alts
        if isinstance(expr, Or):
            return [alt for op in expr.operands for alt in self.translate(op, args, bound)]
        if isinstance(expr, (Foldr, Foldl)):
            name = self.fold_helper(expr)
            return [([Goal(name, args)], [])]
        raise TypeError(f"not an expression: {expr!r}")

    def fold_helper(self, expr) -> str:
        name = f"{self.definition.name}__fold{next(self._folds)}"
        if name in self.taken:
            raise NameCollision(f"auxiliary predicate name '{name}' is already in use")
        self.taken.add(name)
        self.aux_names.append(name)
        y, z = self.var(), self.var()
        for goals, merges in self.translate(expr.base, (y, z), (False, False)):
            self.emit(Goal(name, (y, ListTerm(()), z)), goals, merges)
        y, x, xs, w, z = (self.var() for _ in range(5))
        head = Goal(name, (y, Cons(x, xs), z))
        if isinstance(expr, Foldr):
            rec = Goal(name, (y, xs, w))
            for goals, merges in self.translate(expr.step, (x, w, z), (True, False, False)):
                self.emit(head, [rec] + goals, merges)
        else:
            rec = Goal(name, (w, xs, z))
            for goals, merges in self.translate(expr.step, (x, y, w), (True, False, False)):
                self.emit(head, goals + [rec], merges)
        return name

    def emit(self, head, goals, merges, target=None):
        clause = _apply_merges(head, goals, merges)
        (self.aux_clauses if target is None else target).append(clause)


def _apply_merges(head, goals, merges) -> PrologClause:
    uf = _UnionFind()
    for a, b in merges:
        uf.union(a, b)

    def sub(t):
        if isinstance(t, Var):
            return uf.find(t)
        if isinstance(t, Cons):
            return Cons(sub(t.head), sub(t.tail))
        if isinstance(t, ListTerm):
            return ListTerm(tuple(sub(e) for e in t.elements))
        return t

    return PrologClause(Goal(head.name, tuple(sub(a) for a in head.args)),
                        tuple(Goal(g.name, tuple(sub(a) for a in g.args)) for g in goals))


def compile_definition(program: Program, definition: Definition, taken: Optional[set] = None
                       ) -> CodegenOutput:
    """Compile one definition to its clauses plus any fold helpers."""
    if taken is None:
        taken = set(program.names())
    tr = _Translator(program, definition, taken)
    arity = arity_of(definition.body, program)
    head_args = tuple(tr.var() for _ in range(arity))
    main = []
    for goals, merges in tr.translate(definition.body, head_args, (False,) * arity):
        tr.emit(Goal(definition.name, head_args), goals, merges, target=main)
    clauses = [PrologClause(c.head, c.body, source=definition.name)
               for c in main + tr.aux_clauses]
    return CodegenOutput(clauses, list(tr.aux_names))


def compile_program(program: Program, include_facts: bool = True) -> CodegenOutput:
    out = CodegenOutput()
    if include_facts:
        for name, rel in program.facts.items():
            for row in rel.sorted():
                out.clauses.append(PrologClause(Goal(name, row), (), source=f"facts {name}"))
    taken = set(program.names())
    for definition in program.definitions.values():
        out.extend(compile_definition(program, definition, taken))
    return out


# -- emission ----------------------------------------------------------------

def _term_vars(t):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Cons):
        yield from _term_vars(t.head)
        yield from _term_vars(t.tail)
    elif isinstance(t, ListTerm):
        for e in t.elements:
            yield from _term_vars(e)


def clause_variables(clause: PrologClause) -> list:
    """Variables of a clause in first-occurrence order (head, then body)."""
    seen = []
    for goal in (clause.head,) + clause.body:
        for a in goal.args:
            seen.extend(_term_vars(a))
    return seen


def _render_term(t, names) -> str:
    if isinstance(t, Var):
        return names[t]
    if isinstance(t, Cons):
        return f"[{_render_term(t.head, names)}|{_render_term(t.tail, names)}]"
    if isinstance(t, ListTerm):
        return "[" + ", ".join(_render_term(e, names) for e in t.elements) + "]"
    return str(t)


def _render_goal(goal: Goal, names) -> str:
    args = [_render_term(a, names) for a in goal.args]
    if goal.name in ("=", "\\="):
        return f"{args[0]} {goal.name} {args[1]}"
    return f"{goal.name}({', '.join(args)})"


def render_clause(clause: PrologClause) -> str:
    occurrences = clause_variables(clause)
    counts = {}
    for v in occurrences:
        counts[v] = counts.get(v, 0) + 1
    names, k = {}, 0
    for v in occurrences:
        if v in names:
            continue
        if counts[v] == 1:
            names[v] = "_"
        else:
            k += 1
            names[v] = f"V{k}"
    head = _render_goal(clause.head, names)
    if not clause.body:
        return head + "."
    return head + " :- " + ", ".join(_render_goal(g, names) for g in clause.body) + "."


def emit_prolog_text(output: CodegenOutput, comments: bool = False) -> str:
    """ISO Prolog text, prelude first, one clause per line."""
    lines = []
    if comments:
        lines.append("% cons/3 prelude")
    lines.append(PRELUDE)
    current = None
    for clause in output.clauses:
        if comments and clause.source != current:
            current = clause.source
            label = current if current.startswith("facts") else f"definition {current}"
            lines.append(f"% {label}")
        lines.append(render_clause(clause))
    return "\n".join(lines) + "\n"


def alpha_equivalent(a: PrologClause, b: PrologClause) -> bool:
    """Clause equality up to consistent variable renaming.

    Variables occurring once in a clause are treated as anonymous.
    """
    if (a.head.name, len(a.head.args), len(a.body)) != (b.head.name, len(b.head.args), len(b.body)):
        return False
    ca, cb = _counts(a), _counts(b)
    fwd, back = {}, {}

    def match(x, y) -> bool:
        if isinstance(x, Var) and isinstance(y, Var):
            if ca[x] == 1 or cb[y] == 1:
                return ca[x] == cb[y]
            if fwd.setdefault(x, y) != y or back.setdefault(y, x) != x:
                return False
            return True
        if isinstance(x, Cons) and isinstance(y, Cons):
            return match(x.head, y.head) and match(x.tail, y.tail)
        if isinstance(x, ListTerm) and isinstance(y, ListTerm):
            return len(x.elements) == len(y.elements) and all(
                match(p, q) for p, q in zip(x.elements, y.elements))
        if isinstance(x, (Var, Cons, ListTerm)) or isinstance(y, (Var, Cons, ListTerm)):
            return False
        return x == y

    for ga, gb in zip((a.head,) + a.body, (b.head,) + b.body):
        if ga.name != gb.name or len(ga.args) != len(gb.args):
            return False
        if not all(match(x, y) for x, y in zip(ga.args, gb.args)):
            return False
    return True


def _counts(clause):
    counts = {}
    for v in clause_variables(clause):
        counts[v] = counts.get(v, 0) + 1
    return counts


__all__ = [
    "PRELUDE", "PRELUDE_CLAUSE", "Cons", "Goal", "PrologClause", "CodegenOutput",
    "compile_definition", "compile_program", "emit_prolog_text", "render_clause",
    "alpha_equivalent", "clause_variables",
]
