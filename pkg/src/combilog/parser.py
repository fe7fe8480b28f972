"""Recursive-descent parser for Combilog programs, facts and queries.

Surface syntax::

    head <- make[3,1](cons).          % definition
    parent(p, a).                     % ground fact
    ?- head([a,b], X).                % query (parse_query only)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    BUILTINS,
    KEYWORDS,
    And,
    Definition,
    Foldl,
    Foldr,
    Make,
    Or,
    PredRef,
    Program,
    SourceSpan,
    arity_of,
    check_program,
)
from .errors import ArityMismatch, CombilogSyntaxError, ProgramError, UnknownPredicate
from .terms import Atom, Int, ListTerm, Var

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<arrow><-)
  | (?P<query>\?-)
  | (?P<int>-?[0-9]+)
  | (?P<name>[a-z][a-zA-Z0-9_]*)
  | (?P<var>[A-Z][a-zA-Z0-9_]*|_(?![a-zA-Z0-9_]))
  | (?P<punct>[()\[\],.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        span = SourceSpan(line, pos - line_start + 1, 1)
        if m is None:
            raise CombilogSyntaxError(f"unexpected character {text[pos]!r}", span)
        kind, value = m.lastgroup, m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct":
                kind = value
            tokens.append(Token(kind, value, SourceSpan(span.line, span.column, len(value))))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    eof_col = pos - line_start + 1
    tokens.append(Token("eof", "", SourceSpan(line, eof_col, 0)))
    return tokens


@dataclass(frozen=True)
class Query:
    predicate: str
    arguments: tuple
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "arguments", tuple(self.arguments))
        if not self.arguments:
            raise ValueError("a query needs at least one argument")

    def __str__(self):
        return f"?- {self.predicate}({', '.join(map(str, self.arguments))})."


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.anon = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, expected, message=None):
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise CombilogSyntaxError(message or f"unexpected {found}", tok.span, expected)

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def accept(self, kind: str) -> Optional[Token]:
        if self.tok.kind == kind:
            return self.advance()
        return None

    # -- programs -------------------------------------------------------

    def program(self) -> Program:
        program = Program()
        while self.tok.kind != "eof":
            name_tok = self.tok
            if name_tok.kind != "name":
                self.fail({"name"})
            if name_tok.text in KEYWORDS:
                self.fail({"name"}, f"'{name_tok.text}' is reserved")
            self.advance()
            if self.tok.kind == "arrow":
                self.advance()
                body = self.expr()
                self.expect(".")
                if name_tok.text in program.definitions:
                    raise CombilogSyntaxError(f"duplicate definition of '{name_tok.text}'",
                                              name_tok.span)
                program.add_definition(Definition(name_tok.text, body, name_tok.span))
            elif self.tok.kind == "(":
                self.fact(program, name_tok)
            else:
                self.fail({"<-", "("})
        return program

    def fact(self, program: Program, name_tok: Token) -> None:
        self.expect("(")
        args = [self.term(ground=True)]
        while self.accept(","):
            args.append(self.term(ground=True))
        self.expect(")")
        self.expect(".")
        name = name_tok.text
        existing = program.facts.get(name)
        if existing is not None and existing.arity != len(args):
            raise ArityMismatch(name, existing.arity, len(args), name_tok.span)
        program.fact_spans.setdefault(name, name_tok.span)
        program.add_facts(name, [tuple(args)], len(args))

    def expr(self):
        tok = self.tok
        if tok.kind != "name":
            self.fail({"name", "make", "and", "or", "foldr", "foldl"})
        self.advance()
        if tok.text == "make":
            self.expect("[")
            indices = [self.index()]
            while self.accept(","):
                indices.append(self.index())
            self.expect("]")
            self.expect("(")
            operand = self.expr()
            self.expect(")")
            return Make(tuple(indices), operand, tok.span)
        if tok.text in ("and", "or"):
            self.expect("(")
            ops = [self.expr()]
            while self.accept(","):
                ops.append(self.expr())
            if len(ops) < 2:
                self.fail({","}, f"{tok.text} needs at least two operands")
            self.expect(")")
            return (And if tok.text == "and" else Or)(tuple(ops), tok.span)
        if tok.text in ("foldr", "foldl"):
            self.expect("(")
            step = self.expr()
            self.expect(",")
            base = self.expr()
            self.expect(")")
            return (Foldr if tok.text == "foldr" else Foldl)(step, base, tok.span)
        return PredRef(tok.text, tok.span)

    def index(self) -> int:
        tok = self.expect("int")
        value = int(tok.text)
        if value < 1:
            raise CombilogSyntaxError("make indices are 1-based", tok.span, {"positive int"})
        return value

    def term(self, ground: bool):
        tok = self.tok
        if tok.kind == "name":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "int":
            self.advance()
            return Int(int(tok.text))
        if tok.kind == "var" and not ground:
            self.advance()
            if tok.text == "_":
                self.anon += 1
                return Var(f"_{self.anon}")
            return Var(tok.text)
        if tok.kind == "[":
            self.advance()
            elements = []
            if not self.accept("]"):
                elements.append(self.term(ground))
                while self.accept(","):
                    elements.append(self.term(ground))
                self.expect("]")
            return ListTerm(tuple(elements))
        expected = {"name", "int", "["} if ground else {"name", "int", "var", "["}
        if tok.kind == "var":
            self.fail(expected, "facts must be ground; variables are not allowed")
        self.fail(expected)

    def query(self) -> Query:
        start = self.expect("query")
        name = self.expect("name")
        self.expect("(")
        args = [self.term(ground=False)]
        while self.accept(","):
            args.append(self.term(ground=False))
        self.expect(")")
        self.expect(".")
        self.expect("eof")
        return Query(name.text, tuple(args), start.span)


def parse_program(text: str, check: bool = True) -> Program:
    """Parse program text; with ``check`` raise ProgramError on diagnostics."""
    program = _Parser(text).program()
    if check:
        diags = check_program(program)
        if diags:
            raise ProgramError(diags)
    return program


def parse_expr(text: str):
    parser = _Parser(text)
    expr = parser.expr()
    parser.expect("eof")
    return expr


def parse_query(text: str, program: Optional[Program] = None) -> Query:
    """Parse ``?- name(args).``; validate name and arity when a program is given."""
    query = _Parser(text).query()
    if program is not None:
        kind = program.kind(query.predicate)
        if kind is None:
            raise UnknownPredicate(query.predicate, query.span)
        if kind == "builtin":
            arity = BUILTINS[query.predicate]
        else:
            arity = arity_of(PredRef(query.predicate), program)
        if arity != len(query.arguments):
            raise ArityMismatch(query.predicate, arity, len(query.arguments), query.span)
    return query


def parse_terms(text: str) -> tuple:
    """Parse a comma-separated list of terms (variables allowed)."""
    parser = _Parser(text)
    terms = [parser.term(ground=False)]
    while parser.accept(","):
        terms.append(parser.term(ground=False))
    parser.expect("eof")
    return tuple(terms)
