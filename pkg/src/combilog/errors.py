"""Exception hierarchy shared by every Combilog module."""

from __future__ import annotations


class CombilogError(Exception):
    """Base class for all domain errors raised by this package."""


class UnknownPredicate(CombilogError):
    def __init__(self, name, span=None):
        super().__init__(f"unknown predicate '{name}'")
        self.name = name
        self.span = span


class ArityMismatch(CombilogError):
    def __init__(self, expr, expected, found, span=None):
        super().__init__(f"arity mismatch in {expr}: expected {expected}, found {found}")
        self.expr = expr
        self.expected = expected
        self.found = found
        self.span = span


class RecursiveDefinition(CombilogError):
    def __init__(self, name, span=None):
        super().__init__(f"definition '{name}' refers to itself (use foldr/foldl for recursion)")
        self.name = name
        self.span = span


class CombilogSyntaxError(CombilogError):
    def __init__(self, message, span, expected=()):
        self.span = span
        self.expected = frozenset(expected)
        where = f"{span.line}:{span.column}" if span is not None else "?"
        if self.expected:
            message = f"{message}; expected one of: {', '.join(sorted(self.expected))}"
        super().__init__(f"{where}: {message}")


class ProgramError(CombilogError):
    """Raised by ``parse_program`` when static checks report diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class UnsafeQuery(CombilogError):
    def __init__(self, description, expr=None, unresolved=()):
        super().__init__(description)
        self.expr = expr
        self.unresolved = tuple(unresolved)


class SolutionLimitExceeded(CombilogError):
    pass


class FoldListTooLong(CombilogError):
    pass


class NotFinitelyDenotable(CombilogError):
    def __init__(self, expr, reason=""):
        super().__init__(f"{expr} is not finitely denotable{': ' + reason if reason else ''}")
        self.expr = expr


class UniverseTooLarge(CombilogError):
    pass


class NameCollision(CombilogError):
    pass


class NotDiagrammable(CombilogError):
    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason
