"""Bundled example programs with annotated queries.

Annotations live in comments so the files stay valid ``.cbl`` input::

    %? ?- siblings(X, Y).          safe query, checked against the oracle
    %! ?- ineq(X, Y).              query that must raise UnsafeQuery
    %universe: atoms=a,b lists=2   oracle universe beyond the fact constants
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from ..engine import herbrand_universe
from ..parser import parse_program, parse_query
from ..terms import Atom


@dataclass
class CorpusEntry:
    name: str
    text: str
    safe: list = field(default_factory=list)
    unsafe: list = field(default_factory=list)
    atoms: tuple = ()
    max_list_length: int = 0

    @property
    def program(self):
        return parse_program(self.text)

    def universe(self, queries=()):
        program = self.program
        extra = [a for q in queries for a in q.arguments] + [Atom(a) for a in self.atoms]
        atoms = [Atom(a) for a in self.atoms] or None
        return herbrand_universe(program, extra, atoms, self.max_list_length)


def _parse_entry(name: str, text: str) -> CorpusEntry:
    entry = CorpusEntry(name, text)
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("%?"):
            entry.safe.append(line[2:].strip())
        elif line.startswith("%!"):
            entry.unsafe.append(line[2:].strip())
        elif line.startswith("%universe:"):
            for item in line.split(":", 1)[1].split():
                key, _, value = item.partition("=")
                if key == "atoms":
                    entry.atoms = tuple(v for v in value.split(",") if v)
                elif key == "lists":
                    entry.max_list_length = int(value)
    return entry


def load_corpus() -> list:
    """All bundled programs, sorted by file name."""
    root = resources.files(__name__)
    entries = []
    for path in sorted(root.iterdir(), key=lambda p: p.name):
        if path.name.endswith(".cbl"):
            entries.append(_parse_entry(path.name[:-4], path.read_text(encoding="utf-8")))
    return entries


def corpus_source(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.cbl").read_text(encoding="utf-8")


def safe_pairs():
    """(entry, Query) for every safe query in the corpus."""
    for entry in load_corpus():
        program = entry.program
        for text in entry.safe:
            yield entry, parse_query(text, program)


def unsafe_pairs():
    for entry in load_corpus():
        program = entry.program
        for text in entry.unsafe:
            yield entry, parse_query(text, program)
