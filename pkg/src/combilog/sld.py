"""A small depth-first SLD interpreter for generated clauses.

Used to check that emitted Prolog computes the same answers as the
Combilog engine without requiring an external Prolog system.  Supports
exactly what the code generator emits: user clauses, ``=`` and ``\\=``.
"""

from __future__ import annotations

import itertools

from .codegen import PRELUDE_CLAUSE, Cons, Goal, PrologClause
from .errors import CombilogError
from .terms import ListTerm, Substitution, Var, is_ground


class DepthLimitExceeded(CombilogError):
    pass


def _walk(t, env):
    while isinstance(t, Var) and t.name in env:
        t = env[t.name]
    return t


def _unify(a, b, env) -> bool:
    a, b = _walk(a, env), _walk(b, env)
    if isinstance(a, Var):
        if not (isinstance(b, Var) and b.name == a.name):
            env[a.name] = b
        return True
    if isinstance(b, Var):
        env[b.name] = a
        return True
    if isinstance(a, ListTerm) and isinstance(b, Cons):
        a, b = b, a
    if isinstance(a, Cons):
        if isinstance(b, Cons):
            return _unify(a.head, b.head, env) and _unify(a.tail, b.tail, env)
        if isinstance(b, ListTerm) and b.elements:
            return (_unify(a.head, b.elements[0], env)
                    and _unify(a.tail, ListTerm(b.elements[1:]), env))
        return False
    if isinstance(a, ListTerm) and isinstance(b, ListTerm):
        return len(a.elements) == len(b.elements) and all(
            _unify(x, y, env) for x, y in zip(a.elements, b.elements))
    return a == b


def _resolve(t, env):
    t = _walk(t, env)
    if isinstance(t, ListTerm):
        return ListTerm(tuple(_resolve(e, env) for e in t.elements))
    if isinstance(t, Cons):
        head, tail = _resolve(t.head, env), _resolve(t.tail, env)
        if isinstance(tail, ListTerm):
            return ListTerm((head,) + tail.elements)
        return Cons(head, tail)
    return t


def _rename(t, suffix):
    if isinstance(t, Var):
        return Var(f"{t.name}@{suffix}")
    if isinstance(t, Cons):
        return Cons(_rename(t.head, suffix), _rename(t.tail, suffix))
    if isinstance(t, ListTerm):
        return ListTerm(tuple(_rename(e, suffix) for e in t.elements))
    return t


class Interpreter:
    def __init__(self, clauses, include_prelude: bool = True, max_depth: int = 10_000):
        self.index = {}
        for clause in ([PRELUDE_CLAUSE] if include_prelude else []) + list(clauses):
            key = (clause.head.name, len(clause.head.args))
            self.index.setdefault(key, []).append(clause)
        self.max_depth = max_depth
        self._ids = itertools.count()

    def prove(self, goals, env, depth=0):
        if not goals:
            yield env
            return
        if depth > self.max_depth:
            raise DepthLimitExceeded(f"proof depth exceeded {self.max_depth}")
        goal, rest = goals[0], goals[1:]
        if goal.name == "=":
            env1 = dict(env)
            if _unify(goal.args[0], goal.args[1], env1):
                yield from self.prove(rest, env1, depth + 1)
            return
        if goal.name == "\\=":
            if not _unify(goal.args[0], goal.args[1], dict(env)):
                yield from self.prove(rest, env, depth + 1)
            return
        for clause in self.index.get((goal.name, len(goal.args)), ()):
            k = next(self._ids)
            env1 = dict(env)
            head = [_rename(a, k) for a in clause.head.args]
            if all(_unify(x, y, env1) for x, y in zip(goal.args, head)):
                body = [Goal(g.name, [_rename(a, k) for a in g.args]) for g in clause.body]
                yield from self.prove(body + list(rest), env1, depth + 1)

    def query(self, name: str, args) -> set:
        """Answer set for ``name(args)``; anonymous ``_N`` variables are dropped."""
        goal = Goal(name, tuple(args))
        names = []
        for a in args:
            for v in _vars(a):
                if not v.name.startswith("_") and v.name not in names:
                    names.append(v.name)
        answers = set()
        for env in self.prove([goal], {}):
            theta = {n: _resolve(Var(n), env) for n in names}
            if not all(is_ground(t) for t in theta.values()):
                raise CombilogError(f"non-ground answer {theta}")
            answers.add(Substitution(theta))
        return answers


def _vars(t):
    if isinstance(t, Var):
        yield t
    elif isinstance(t, ListTerm):
        for e in t.elements:
            yield from _vars(e)


def run_clauses(clauses, query) -> set:
    """Run a parsed Query against generated clauses."""
    name = {"eq": "=", "ineq": "\\="}.get(query.predicate, query.predicate)
    return Interpreter(clauses).query(name, query.arguments)


__all__ = ["Interpreter", "run_clauses", "DepthLimitExceeded", "PrologClause"]
