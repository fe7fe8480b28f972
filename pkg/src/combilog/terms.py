"""First-order terms, ground relations and answer substitutions."""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class ListTerm:
    elements: tuple = ()

    def __post_init__(self):
        if not isinstance(self.elements, tuple):
            object.__setattr__(self, "elements", tuple(self.elements))

    def __str__(self):
        return "[" + ",".join(str(e) for e in self.elements) + "]"

    def __len__(self):
        return len(self.elements)


Term = Union[Atom, Int, Var, ListTerm]

NIL = ListTerm(())


def format_term(term: Term) -> str:
    return str(term)


def term_sort_key(term: Term):
    """Total order on terms: integers < atoms < lists < variables."""
    if isinstance(term, Int):
        return (0, term.value)
    if isinstance(term, Atom):
        return (1, term.name)
    if isinstance(term, ListTerm):
        return (2, len(term.elements), tuple(term_sort_key(e) for e in term.elements))
    return (3, term.name)


def is_ground(term: Term) -> bool:
    if isinstance(term, Var):
        return False
    if isinstance(term, ListTerm):
        return all(is_ground(e) for e in term.elements)
    return True


def term_vars(term: Term) -> Iterator[Var]:
    if isinstance(term, Var):
        yield term
    elif isinstance(term, ListTerm):
        for e in term.elements:
            yield from term_vars(e)


def subterms(term: Term) -> Iterator[Term]:
    """Yield ``term`` and, for lists, every element and every proper suffix."""
    yield term
    if isinstance(term, ListTerm):
        for i in range(1, len(term.elements) + 1):
            yield ListTerm(term.elements[i:])
        for e in term.elements:
            yield from subterms(e)


def make_term(value) -> Term:
    """Coerce Python shorthand (str, int, list) into a term.

    Strings starting with an uppercase letter or ``_`` become variables.
    """
    if isinstance(value, (Atom, Int, Var, ListTerm)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not terms")
    if isinstance(value, int):
        return Int(value)
    if isinstance(value, str):
        if value[:1].isupper() or value[:1] == "_":
            return Var(value)
        return Atom(value)
    if isinstance(value, (list, tuple)):
        return ListTerm(tuple(make_term(v) for v in value))
    raise TypeError(f"cannot convert {value!r} to a term")


class Relation:
    """A finite set of ground tuples of one arity."""

    __slots__ = ("arity", "tuples")

    def __init__(self, arity: int, tuples: Iterable = ()):
        if arity < 1:
            raise ValueError("relation arity must be positive")
        rows = set()
        for row in tuples:
            row = tuple(make_term(t) for t in row)
            if len(row) != arity:
                raise ValueError(f"tuple {row} does not have arity {arity}")
            if not all(is_ground(t) for t in row):
                raise ValueError(f"tuple {row} is not ground")
            rows.add(row)
        self.arity = arity
        self.tuples = frozenset(rows)

    def __eq__(self, other):
        if not isinstance(other, Relation):
            return NotImplemented
        return self.arity == other.arity and self.tuples == other.tuples

    def __hash__(self):
        return hash((self.arity, self.tuples))

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(self.sorted())

    def __contains__(self, row):
        return tuple(row) in self.tuples

    def sorted(self) -> list:
        return sorted(self.tuples, key=lambda row: tuple(term_sort_key(t) for t in row))

    def __repr__(self):
        body = ", ".join("(" + ", ".join(map(str, row)) + ")" for row in self.sorted())
        return f"Relation({self.arity}, {{{body}}})"


class Substitution(Mapping):
    """Immutable, hashable mapping from variable names to ground terms."""

    __slots__ = ("_items",)

    def __init__(self, bindings=()):
        if isinstance(bindings, Mapping):
            bindings = bindings.items()
        self._items = tuple(sorted((str(k), make_term(v)) for k, v in bindings))

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._items == other._items
        if isinstance(other, Mapping):
            return dict(self._items) == dict(other)
        return NotImplemented

    def format(self) -> str:
        return ", ".join(f"{k} = {v}" for k, v in self._items)

    def __repr__(self):
        return "{" + self.format() + "}"
