"""Inverted indexes over word, concept, or relation terms.

Units are whole documents or passages. Empty units stay in the
collection (they contribute to N and avgdl); a unit's length is its
total term count in the index's space. The persisted form is a plain
text format: a header, T/P term-posting lines, then a U unit-table
section.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Mapping

from .errors import FormatError


class TermSpace(str, Enum):
    WORD = "WORD"
    CONCEPT = "CONCEPT"
    RELATION = "RELATION"


GRANULARITIES = ("doc", "passage")


@dataclass(frozen=True)
class IndexUnit:
    unit_id: str
    parent_doc_id: str
    length: int


@dataclass(frozen=True)
class Posting:
    unit_id: str
    tf: int


_HEADER_RE = re.compile(
    r"^#index space=(WORD|CONCEPT|RELATION) granularity=(doc|passage) "
    r"N=(\d+) avgdl=([0-9.eE+-]+)$"
)


class InvertedIndex:
    def __init__(
        self,
        space: TermSpace,
        granularity: str,
        units: dict[str, IndexUnit],
        postings: dict[str, dict[str, int]],
    ):
        if granularity not in GRANULARITIES:
            raise ValueError(f"granularity must be one of {GRANULARITIES}")
        self.space = space
        self.granularity = granularity
        self.units = units
        self._tf = postings
        self._postings = {
            term: [Posting(u, tf) for u, tf in sorted(by_unit.items())]
            for term, by_unit in postings.items()
        }
        self.N = len(units)
        total = sum(u.length for u in units.values())
        self.avgdl = total / self.N if self.N else 0.0

    def lookup(self, term: str) -> list[Posting]:
        return self._postings.get(term, [])

    def df(self, term: str) -> int:
        return len(self._postings.get(term, ()))

    def tf(self, term: str, unit_id: str) -> int:
        return self._tf.get(term, {}).get(unit_id, 0)

    def terms(self) -> list[str]:
        return sorted(self._postings)


def build_index(
    units: Iterable[tuple[str, str, Mapping[str, int] | Iterable[str]]],
    space: TermSpace,
    granularity: str = "doc",
) -> InvertedIndex:
    unit_table: dict[str, IndexUnit] = {}
    postings: dict[str, dict[str, int]] = {}
    for unit_id, parent_doc_id, terms in units:
        if unit_id in unit_table:
            raise ValueError(f"duplicate unit_id {unit_id!r}")
        counts = terms if isinstance(terms, Mapping) else Counter(terms)
        length = 0
        for term, tf in counts.items():
            if tf < 1:
                raise ValueError(f"unit {unit_id}: term {term!r} has tf {tf}")
            postings.setdefault(term, {})[unit_id] = int(tf)
            length += int(tf)
        unit_table[unit_id] = IndexUnit(unit_id, parent_doc_id, length)
    return InvertedIndex(space, granularity, unit_table, postings)


def lookup(index: InvertedIndex, term: str) -> list[Posting]:
    return index.lookup(term)


def save_index(index: InvertedIndex, stream: IO[str], comments: Iterable[str] = ()) -> None:
    stream.write(
        f"#index space={index.space.value} granularity={index.granularity} "
        f"N={index.N} avgdl={index.avgdl!r}\n"
    )
    for comment in comments:
        stream.write(f"# {comment}\n")
    for term in index.terms():
        stream.write(f"T {term}\n")
        for p in index.lookup(term):
            stream.write(f"P {p.unit_id} {p.tf}\n")
    for unit_id in sorted(index.units):
        u = index.units[unit_id]
        stream.write(f"U {u.unit_id} {u.parent_doc_id} {u.length}\n")


def load_index(stream: Iterable[str]) -> InvertedIndex:
    it = iter(stream)
    try:
        header = next(it).rstrip("\n")
    except StopIteration:
        raise FormatError("empty index file") from None
    m = _HEADER_RE.match(header)
    if not m:
        raise FormatError(f"bad index header: {header!r}")
    space = TermSpace(m.group(1))
    granularity = m.group(2)
    n_declared = int(m.group(3))
    avgdl_declared = float(m.group(4))

    postings: dict[str, dict[str, int]] = {}
    units: dict[str, IndexUnit] = {}
    term: str | None = None
    for lineno, raw in enumerate(it, 2):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("T "):
            term = line[2:]
            if term in postings:
                raise FormatError(f"line {lineno}: duplicate term {term!r}")
            postings[term] = {}
        elif line.startswith("P "):
            if term is None:
                raise FormatError(f"line {lineno}: posting before any term")
            parts = line[2:].split()
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: bad posting line")
            unit_id, tf_s = parts
            if not tf_s.isdigit() or int(tf_s) < 1:
                raise FormatError(f"line {lineno}: bad tf {tf_s!r}")
            if unit_id in postings[term]:
                raise FormatError(f"line {lineno}: duplicate posting {unit_id}")
            postings[term][unit_id] = int(tf_s)
        elif line.startswith("U "):
            parts = line[2:].split()
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: bad unit line")
            unit_id, parent, length_s = parts
            if unit_id in units:
                raise FormatError(f"line {lineno}: duplicate unit {unit_id}")
            if not length_s.isdigit():
                raise FormatError(f"line {lineno}: bad unit length {length_s!r}")
            units[unit_id] = IndexUnit(unit_id, parent, int(length_s))
        else:
            raise FormatError(f"line {lineno}: unexpected line {line!r}")

    if len(units) != n_declared:
        raise FormatError(f"unit table holds {len(units)} units, header says {n_declared}")
    lengths = Counter()
    for term_key, by_unit in postings.items():
        for unit_id, tf in by_unit.items():
            if unit_id not in units:
                raise FormatError(f"posting references unknown unit {unit_id}")
            lengths[unit_id] += tf
    for unit_id, u in units.items():
        if lengths.get(unit_id, 0) != u.length:
            raise FormatError(
                f"unit {unit_id}: stored length {u.length} != posting sum {lengths.get(unit_id, 0)}"
            )
    index = InvertedIndex(space, granularity, units, postings)
    if abs(index.avgdl - avgdl_declared) > 1e-9:
        raise FormatError(
            f"declared avgdl {avgdl_declared} != recomputed {index.avgdl}"
        )
    return index
