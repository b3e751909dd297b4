"""Readers and writers for the file contracts shared with the retrieval engine.

Inputs: sentence-tokens file (text_id, sentence_index, space-joined
tokens), mention file (text_id, sentence_index, cui, token_start,
token_end, matched_string), and the pipe-delimited KB snapshot. Output:
the tab-separated annotation format. Lines starting with '#' are
comments everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class Mention:
    cui: str
    token_start: int
    token_end: int


@dataclass(frozen=True)
class AnnotationRow:
    text_id: str
    sentence_index: int
    subject_cui: str
    predicate: str
    object_cui: str
    confidence: float


SentenceKey = tuple[str, int]


def _data_lines(stream: Iterable[str]):
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line


def read_sentences(stream: Iterable[str]) -> dict[SentenceKey, list[str]]:
    sentences: dict[SentenceKey, list[str]] = {}
    for lineno, line in _data_lines(stream):
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"sentences line {lineno}: expected 3 fields")
        text_id, index_s, tokens = parts
        try:
            index = int(index_s)
        except ValueError:
            raise FormatError(f"sentences line {lineno}: bad index {index_s!r}") from None
        key = (text_id, index)
        if key in sentences:
            raise FormatError(f"sentences line {lineno}: duplicate sentence {key}")
        sentences[key] = tokens.split()
    return sentences


def read_mentions(stream: Iterable[str]) -> dict[SentenceKey, list[Mention]]:
    mentions: dict[SentenceKey, list[Mention]] = {}
    for lineno, line in _data_lines(stream):
        parts = line.split("\t")
        if len(parts) != 6:
            raise FormatError(f"mentions line {lineno}: expected 6 fields")
        text_id, index_s, cui, start_s, end_s, _string = parts
        try:
            index, start, end = int(index_s), int(start_s), int(end_s)
        except ValueError:
            raise FormatError(f"mentions line {lineno}: bad integer field") from None
        if start < 0 or end < start:
            raise FormatError(f"mentions line {lineno}: bad span {start}..{end}")
        mentions.setdefault((text_id, index), []).append(Mention(cui, start, end))
    return mentions


class Kb:
    def __init__(self, cuis: set[str], relations: list[tuple[str, str, str]]):
        self.cuis = cuis
        self.relations = relations
        self._by_pair: dict[tuple[str, str], list[tuple[str, str, str]]] = {}
        for subj, pred, obj in relations:
            key = (subj, obj) if subj <= obj else (obj, subj)
            self._by_pair.setdefault(key, []).append((subj, pred, obj))
        for triples in self._by_pair.values():
            triples.sort(key=lambda t: (t[1], t[0]))

    def relations_between(self, a: str, b: str) -> list[tuple[str, str, str]]:
        if a == b:
            return []
        key = (a, b) if a <= b else (b, a)
        return list(self._by_pair.get(key, []))

    def predicates(self) -> list[str]:
        return sorted({pred for _, pred, _ in self.relations})


def read_kb(concept_stream: Iterable[str], relation_stream: Iterable[str]) -> Kb:
    cuis = set()
    for lineno, line in _data_lines(concept_stream):
        parts = line.split("|")
        if len(parts) != 3:
            raise FormatError(f"concepts line {lineno}: expected 3 fields")
        cuis.add(parts[0].strip())
    relations = []
    for lineno, line in _data_lines(relation_stream):
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 3:
            raise FormatError(f"relations line {lineno}: expected 3 fields")
        subj, pred, obj = parts
        if subj not in cuis or obj not in cuis:
            raise FormatError(f"relations line {lineno}: unknown cui in {line!r}")
        relations.append((subj, pred, obj))
    return Kb(cuis, relations)


def write_annotations(rows: Iterable[AnnotationRow], stream: IO[str], comments: Iterable[str] = ()) -> None:
    """Emit the shared annotation schema with source fixed to 'learned'."""
    for comment in comments:
        stream.write(f"# {comment}\n")
    for r in rows:
        stream.write(
            f"{r.text_id}\t{r.sentence_index}\t{r.subject_cui}\t{r.predicate}\t"
            f"{r.object_cui}\tlearned\t{r.confidence!r}\n"
        )
