"""Combilog abstract syntax, programs and static checks.

Expressions are variable-free: a program is built from predicate
references combined with ``make``, n-ary ``and``/``or`` and the two fold
operators.  All nodes are frozen dataclasses; source spans are carried
along for diagnostics but never take part in structural equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import ArityMismatch, RecursiveDefinition, UnknownPredicate
from .terms import Relation

BUILTINS = {"cons": 3, "eq": 2, "ineq": 2}
KEYWORDS = frozenset({"make", "and", "or", "foldr", "foldl"})
FOLD_ARITY = 3
FOLD_STEP_ARITY = 3
FOLD_BASE_ARITY = 2


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError("source positions are 1-based")

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class PredRef:
    name: str
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Make:
    indices: tuple
    operand: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if not self.indices:
            raise ValueError("make index list must be nonempty")
        if any(not isinstance(i, int) or i < 1 for i in self.indices):
            raise ValueError(f"make indices must be positive integers: {self.indices}")


@dataclass(frozen=True)
class And:
    operands: tuple
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) < 2:
            raise ValueError("and needs at least two operands")


@dataclass(frozen=True)
class Or:
    operands: tuple
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "operands", tuple(self.operands))
        if len(self.operands) < 2:
            raise ValueError("or needs at least two operands")


@dataclass(frozen=True)
class Foldr:
    step: "Expr"
    base: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Foldl:
    step: "Expr"
    base: "Expr"
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


Expr = Union[PredRef, Make, And, Or, Foldr, Foldl]


@dataclass(frozen=True)
class Definition:
    name: str
    body: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass
class Program:
    definitions: dict = field(default_factory=dict)
    facts: dict = field(default_factory=dict)
    fact_spans: dict = field(default_factory=dict, compare=False, repr=False)

    builtins = BUILTINS

    def kind(self, name: str) -> Optional[str]:
        if name in self.definitions:
            return "definition"
        if name in self.facts:
            return "fact"
        if name in BUILTINS:
            return "builtin"
        return None

    def names(self) -> set:
        return set(self.definitions) | set(self.facts) | set(BUILTINS)

    def add_definition(self, definition: Definition) -> None:
        self.definitions[definition.name] = definition

    def add_facts(self, name: str, rows, arity: Optional[int] = None) -> None:
        rows = [tuple(r) for r in rows]
        if arity is None:
            arity = len(rows[0])
        existing = self.facts.get(name)
        if existing is not None:
            rows = list(existing.tuples) + rows
        self.facts[name] = Relation(arity, rows)


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    subject: str = ""
    span: Optional[SourceSpan] = None

    def __str__(self):
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.kind}: {self.message}"


def children(expr: Expr) -> tuple:
    if isinstance(expr, Make):
        return (expr.operand,)
    if isinstance(expr, (And, Or)):
        return expr.operands
    if isinstance(expr, (Foldr, Foldl)):
        return (expr.step, expr.base)
    return ()


def walk(expr: Expr):
    """Pre-order traversal of an expression tree."""
    yield expr
    for child in children(expr):
        yield from walk(child)


def referenced_names(expr: Expr) -> list:
    return [e.name for e in walk(expr) if isinstance(e, PredRef)]


def arity_of(expr: Expr, program: Program, _stack: tuple = ()) -> int:
    """Return the arity of ``expr``, raising on the first static error."""
    if isinstance(expr, PredRef):
        name = expr.name
        if name in program.definitions:
            if name in _stack:
                raise RecursiveDefinition(name, expr.span)
            return arity_of(program.definitions[name].body, program, _stack + (name,))
        if name in program.facts:
            return program.facts[name].arity
        if name in BUILTINS:
            return BUILTINS[name]
        raise UnknownPredicate(name, expr.span)
    if isinstance(expr, Make):
        arity_of(expr.operand, program, _stack)
        return len(expr.indices)
    if isinstance(expr, (And, Or)):
        arities = [arity_of(op, program, _stack) for op in expr.operands]
        for a in arities[1:]:
            if a != arities[0]:
                raise ArityMismatch(expr, arities[0], a, expr.span)
        return arities[0]
    if isinstance(expr, (Foldr, Foldl)):
        step = arity_of(expr.step, program, _stack)
        if step != FOLD_STEP_ARITY:
            raise ArityMismatch(expr.step, FOLD_STEP_ARITY, step, expr.span)
        base = arity_of(expr.base, program, _stack)
        if base != FOLD_BASE_ARITY:
            raise ArityMismatch(expr.base, FOLD_BASE_ARITY, base, expr.span)
        return FOLD_ARITY
    raise TypeError(f"not an expression: {expr!r}")


def _recursive_names(program: Program) -> set:
    graph = {
        name: {n for n in referenced_names(d.body) if n in program.definitions}
        for name, d in program.definitions.items()
    }
    cyclic = set()
    for start in graph:
        seen, todo = set(), list(graph[start])
        while todo:
            n = todo.pop()
            if n == start:
                cyclic.add(start)
                break
            if n not in seen:
                seen.add(n)
                todo.extend(graph[n])
    return cyclic


def _check_expr(expr, program, cyclic, diags) -> Optional[int]:
    # Collects every violation instead of stopping at the first one.
    if isinstance(expr, PredRef):
        kind = program.kind(expr.name)
        if kind is None:
            diags.append(Diagnostic("UnknownPredicate", f"unknown predicate '{expr.name}'",
                                    expr.name, expr.span))
            return None
        if kind == "definition" and expr.name in cyclic:
            return None
        try:
            return arity_of(expr, program)
        except (UnknownPredicate, ArityMismatch, RecursiveDefinition):
            # reported when the referenced definition itself is checked
            return None
    if isinstance(expr, Make):
        _check_expr(expr.operand, program, cyclic, diags)
        return len(expr.indices)
    if isinstance(expr, (And, Or)):
        arities = [_check_expr(op, program, cyclic, diags) for op in expr.operands]
        known = [a for a in arities if a is not None]
        if any(a != known[0] for a in known[1:]):
            op = "and" if isinstance(expr, And) else "or"
            diags.append(Diagnostic("ArityMismatch",
                                    f"{op} operands have arities {arities}", op, expr.span))
            return None
        return known[0] if len(known) == len(arities) else None
    if isinstance(expr, (Foldr, Foldl)):
        op = "foldr" if isinstance(expr, Foldr) else "foldl"
        for part, want, role in ((expr.step, FOLD_STEP_ARITY, "step"),
                                 (expr.base, FOLD_BASE_ARITY, "base")):
            a = _check_expr(part, program, cyclic, diags)
            if a is not None and a != want:
                diags.append(Diagnostic("ArityMismatch",
                                        f"{op} {role} must have arity {want}, found {a}",
                                        op, getattr(part, "span", None) or expr.span))
        return FOLD_ARITY
    raise TypeError(f"not an expression: {expr!r}")


def check_program(program: Program) -> list:
    """Return one diagnostic per static violation; empty means well-formed."""
    diags = []
    for name in program.definitions:
        if name in program.facts:
            span = program.definitions[name].span
            diags.append(Diagnostic("NameClash", f"'{name}' is both a definition and a fact",
                                    name, span))
        if name in BUILTINS:
            diags.append(Diagnostic("NameClash", f"'{name}' redefines a built-in", name,
                                    program.definitions[name].span))
    for name in program.facts:
        if name in BUILTINS:
            diags.append(Diagnostic("NameClash", f"facts for built-in '{name}'", name,
                                    program.fact_spans.get(name)))
    for name in set(program.definitions) | set(program.facts):
        if name in KEYWORDS:
            diags.append(Diagnostic("NameClash", f"'{name}' is a reserved word", name))

    cyclic = _recursive_names(program)
    for name, definition in program.definitions.items():
        if name in cyclic:
            diags.append(Diagnostic("RecursiveDefinition",
                                    f"definition '{name}' is recursive; use foldr/foldl",
                                    name, definition.span))
        _check_expr(definition.body, program, cyclic, diags)
    return diags


def flatten(expr: Expr) -> Expr:
    """Normalize nested same-kind ``and``/``or`` nodes into single n-ary nodes."""
    if isinstance(expr, (And, Or)):
        kind = type(expr)
        ops = []
        for op in expr.operands:
            op = flatten(op)
            if type(op) is kind:
                ops.extend(op.operands)
            else:
                ops.append(op)
        return kind(tuple(ops), expr.span)
    if isinstance(expr, Make):
        return Make(expr.indices, flatten(expr.operand), expr.span)
    if isinstance(expr, Foldr):
        return Foldr(flatten(expr.step), flatten(expr.base), expr.span)
    if isinstance(expr, Foldl):
        return Foldl(flatten(expr.step), flatten(expr.base), expr.span)
    return expr


def normalize(obj):
    """Flatten every expression in an expression, definition or program."""
    if isinstance(obj, Program):
        return Program(
            {n: normalize(d) for n, d in obj.definitions.items()},
            dict(obj.facts),
            dict(obj.fact_spans),
        )
    if isinstance(obj, Definition):
        return Definition(obj.name, flatten(obj.body), obj.span)
    return flatten(obj)


def _print_expr(expr: Expr) -> str:
    if isinstance(expr, PredRef):
        return expr.name
    if isinstance(expr, Make):
        return "make[" + ",".join(map(str, expr.indices)) + "](" + _print_expr(expr.operand) + ")"
    if isinstance(expr, (And, Or)):
        op = "and" if isinstance(expr, And) else "or"
        return op + "(" + ", ".join(_print_expr(e) for e in expr.operands) + ")"
    if isinstance(expr, (Foldr, Foldl)):
        op = "foldr" if isinstance(expr, Foldr) else "foldl"
        return f"{op}({_print_expr(expr.step)}, {_print_expr(expr.base)})"
    raise TypeError(f"not an expression: {expr!r}")


def pretty_print(obj) -> str:
    """Render an expression, definition or program in canonical surface syntax.

    Nested conjunctions and disjunctions are flattened first, so the output
    re-parses to the normalized tree.
    """
    obj = normalize(obj)
    if isinstance(obj, Program):
        lines = [pretty_print(d) for d in obj.definitions.values()]
        for name, rel in obj.facts.items():
            for row in rel.sorted():
                lines.append(f"{name}({', '.join(map(str, row))}).")
        return "\n".join(lines) + ("\n" if lines else "")
    if isinstance(obj, Definition):
        return f"{obj.name} <- {_print_expr(obj.body)}."
    return _print_expr(obj)
