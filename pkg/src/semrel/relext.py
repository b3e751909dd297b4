"""Rule-based sentence-level relation extraction and annotation file I/O.

A relation is assigned to every unordered pair of distinct concepts in a
sentence whenever the KB relates them, in the KB's stored direction. The
tab-separated annotation file is the contract consumed from external
(learned) extractors as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .errors import FormatError
from .kb import KnowledgeBase
from .linker import ConceptMention

SOURCES = ("rule", "learned")


@dataclass(frozen=True)
class RelationInstance:
    subject_cui: str
    predicate: str
    object_cui: str
    text_id: str
    sentence_index: int
    source: str
    confidence: float

    def __post_init__(self):
        if self.subject_cui == self.object_cui:
            raise ValueError(f"subject equals object: {self.subject_cui}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence outside [0,1]: {self.confidence}")
        if self.source == "rule" and self.confidence != 1.0:
            raise ValueError("rule-based instances must have confidence 1.0")


def relation_token(instance: RelationInstance) -> str:
    """Canonical direction-preserving BoR term."""
    return f"{instance.subject_cui}|{instance.predicate}|{instance.object_cui}"


def extract_rule_based(
    mentions: list[ConceptMention], kb: KnowledgeBase
) -> list[RelationInstance]:
    """All KB triples over unordered CUI pairs in a single sentence.

    Repeated mentions of a CUI do not multiply instances.
    """
    if not mentions:
        return []
    keys = {(m.text_id, m.sentence_index) for m in mentions}
    if len(keys) > 1:
        raise ValueError(f"mentions span multiple sentences: {sorted(keys)}")
    text_id, sentence_index = next(iter(keys))
    cuis = sorted({m.cui for m in mentions})
    instances = []
    for i, a in enumerate(cuis):
        for b in cuis[i + 1 :]:
            for rel in kb.relations_between(a, b):
                instances.append(
                    RelationInstance(
                        subject_cui=rel.subject_cui,
                        predicate=rel.predicate,
                        object_cui=rel.object_cui,
                        text_id=text_id,
                        sentence_index=sentence_index,
                        source="rule",
                        confidence=1.0,
                    )
                )
    return instances


def write_annotations(
    instances: Iterable[RelationInstance], stream: IO[str], comments: Iterable[str] = ()
) -> None:
    for comment in comments:
        stream.write(f"# {comment}\n")
    for r in instances:
        stream.write(
            f"{r.text_id}\t{r.sentence_index}\t{r.subject_cui}\t{r.predicate}\t"
            f"{r.object_cui}\t{r.source}\t{r.confidence!r}\n"
        )


def read_annotations(stream: Iterable[str]) -> list[RelationInstance]:
    instances = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 7:
            raise FormatError(f"line {lineno}: expected 7 fields, got {len(parts)}")
        text_id, sent_s, subj, pred, obj, source, conf_s = parts
        for field, value in (
            ("text_id", text_id),
            ("subject_cui", subj),
            ("predicate", pred),
            ("object_cui", obj),
        ):
            if not value:
                raise FormatError(f"line {lineno}: empty {field}")
        try:
            sent = int(sent_s)
        except ValueError:
            raise FormatError(
                f"line {lineno}: non-integer sentence_index {sent_s!r}"
            ) from None
        if sent < 0:
            raise FormatError(f"line {lineno}: negative sentence_index {sent}")
        if source not in SOURCES:
            raise FormatError(f"line {lineno}: bad source {source!r}")
        try:
            confidence = float(conf_s)
        except ValueError:
            raise FormatError(f"line {lineno}: bad confidence {conf_s!r}") from None
        if not 0.0 <= confidence <= 1.0:
            raise FormatError(f"line {lineno}: confidence {confidence} outside [0,1]")
        try:
            instances.append(
                RelationInstance(subj, pred, obj, text_id, sent, source, confidence)
            )
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return instances
