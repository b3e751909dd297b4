"""Knowledge-base snapshot: concept lexicon plus directed relation triples.

Two pipe-delimited files (see fixtures/kb_*.psv). The loaded KB is
immutable and answers pairwise relation lookups in O(1) expected time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import FormatError


@dataclass(frozen=True)
class Concept:
    cui: str
    preferred_name: str
    synonyms: tuple[str, ...]


@dataclass(frozen=True)
class KbRelation:
    subject_cui: str
    predicate: str
    object_cui: str


class KnowledgeBase:
    def __init__(self, concepts: dict[str, Concept], relations: list[KbRelation]):
        self.concepts = concepts
        self.relations = relations
        self._by_pair: dict[tuple[str, str], list[KbRelation]] = {}
        for rel in relations:
            key = _pair_key(rel.subject_cui, rel.object_cui)
            self._by_pair.setdefault(key, []).append(rel)
        for rels in self._by_pair.values():
            rels.sort(key=lambda r: (r.predicate, r.subject_cui))

    def concept(self, cui: str) -> Concept | None:
        return self.concepts.get(cui)

    def relations_between(self, cui_a: str, cui_b: str) -> list[KbRelation]:
        """All stored triples over the unordered pair, in stored direction."""
        if cui_a == cui_b:
            return []
        return list(self._by_pair.get(_pair_key(cui_a, cui_b), []))

    def predicates(self) -> list[str]:
        return sorted({r.predicate for r in self.relations})


def _pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _records(stream: Iterable[str], n_fields: int, what: str):
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != n_fields:
            raise FormatError(
                f"{what} line {lineno}: expected {n_fields} pipe-delimited fields"
            )
        if any(not p.strip() for p in parts):
            raise FormatError(f"{what} line {lineno}: empty field in {line!r}")
        yield lineno, [p.strip() for p in parts]


def load_kb(concept_stream: Iterable[str], relation_stream: Iterable[str]) -> KnowledgeBase:
    preferred: dict[str, str] = {}
    synonyms: dict[str, list[str]] = {}
    for lineno, (cui, string, flag) in _records(concept_stream, 3, "concepts"):
        if flag not in ("P", "S"):
            raise FormatError(f"concepts line {lineno}: flag must be P or S, got {flag!r}")
        if flag == "P":
            if cui in preferred:
                raise FormatError(f"concepts line {lineno}: duplicate cui {cui}")
            preferred[cui] = string
        bucket = synonyms.setdefault(cui, [])
        if string not in bucket:
            bucket.append(string)

    concepts = {}
    for cui, names in synonyms.items():
        if cui not in preferred:
            raise FormatError(f"concept {cui} has no preferred (P) name")
        concepts[cui] = Concept(cui, preferred[cui], tuple(names))

    relations = []
    seen = set()
    for lineno, (subj, pred, obj) in _records(relation_stream, 3, "relations"):
        if subj == obj:
            raise FormatError(
                f"relations line {lineno}: subject equals object in {subj}|{pred}|{obj}"
            )
        for cui in (subj, obj):
            if cui not in concepts:
                raise FormatError(
                    f"relations line {lineno}: unknown cui {cui} in {subj}|{pred}|{obj}"
                )
        triple = (subj, pred, obj)
        if triple in seen:
            raise FormatError(
                f"relations line {lineno}: duplicate triple {subj}|{pred}|{obj}"
            )
        seen.add(triple)
        relations.append(KbRelation(subj, pred, obj))
    return KnowledgeBase(concepts, relations)
