"""BM25 scoring and ranking; passage-level relation-weighted document score.

The passage score of a document is the sum over its passages of
(|R_p inter R_q| / |R_q|) * BM25(p, q), where R_q is the query's relation
set, R_p the relation terms present in the passage, and BM25 runs over
the relation-space passage index with the query terms R_q. Topics with
an empty R_q get no score at all (NA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .corpus_io import RunEntry
from .errors import ConfigError
from .index import IndexUnit, InvertedIndex, TermSpace


@dataclass(frozen=True)
class RankingParams:
    k1: float = 1.2
    b: float = 0.75
    top_k: int = 1000
    passage_len: int = 2

    def __post_init__(self):
        if self.k1 < 0:
            raise ConfigError(f"k1 must be >= 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b must be in [0,1], got {self.b}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if self.passage_len < 1:
            raise ConfigError(f"passage_len must be >= 1, got {self.passage_len}")


@dataclass(frozen=True)
class QueryAnalysis:
    topic_id: str
    word_terms: Mapping[str, int] = field(default_factory=dict)
    concept_terms: Mapping[str, int] = field(default_factory=dict)
    relation_terms: Mapping[str, int] = field(default_factory=dict)

    def terms(self, space: TermSpace) -> Mapping[str, int]:
        if space is TermSpace.WORD:
            return self.word_terms
        if space is TermSpace.CONCEPT:
            return self.concept_terms
        return self.relation_terms

    @property
    def relation_set(self) -> frozenset[str]:
        return frozenset(self.relation_terms)


def idf(index: InvertedIndex, term: str) -> float:
    """ln(1 + (N - df + 0.5) / (df + 0.5)); non-negative for df <= N."""
    df = index.df(term)
    return math.log(1.0 + (index.N - df + 0.5) / (df + 0.5))


def _tf_part(tf: int, length: int, index: InvertedIndex, params: RankingParams) -> float:
    norm = params.k1 * (1.0 - params.b + params.b * length / index.avgdl)
    return tf * (params.k1 + 1.0) / (tf + norm)


def bm25(
    query_terms: Mapping[str, int] | Iterable[str],
    unit: IndexUnit,
    index: InvertedIndex,
    params: RankingParams,
) -> float:
    """Okapi BM25 of one unit; query-side term repetition is ignored."""
    if index.N == 0:
        raise ConfigError("cannot score against an empty index")
    score = 0.0
    for term in set(query_terms):
        tf = index.tf(term, unit.unit_id)
        if tf == 0:
            continue
        score += idf(index, term) * _tf_part(tf, unit.length, index, params)
    return score


def rank_documents(
    qa: QueryAnalysis,
    index: InvertedIndex,
    params: RankingParams,
    run_tag: str = "run",
) -> list[RunEntry]:
    """Top-k units by BM25, ties broken by unit_id; zero scores omitted."""
    if index.N == 0:
        raise ConfigError("cannot score against an empty index")
    if index.granularity != "doc":
        raise ConfigError("rank_documents requires a doc-granularity index")
    scores: dict[str, float] = {}
    for term in sorted(set(qa.terms(index.space))):
        weight = idf(index, term)
        for posting in index.lookup(term):
            length = index.units[posting.unit_id].length
            scores[posting.unit_id] = scores.get(posting.unit_id, 0.0) + (
                weight * _tf_part(posting.tf, length, index, params)
            )
    ranked = sorted(
        ((unit_id, s) for unit_id, s in scores.items() if s > 0.0),
        key=lambda kv: (-kv[1], kv[0]),
    )[: params.top_k]
    return [
        RunEntry(qa.topic_id, unit_id, rank, score, run_tag)
        for rank, (unit_id, score) in enumerate(ranked, 1)
    ]


def eq1_document_score(passage_parts: Iterable[tuple[int, float]], rq_size: int) -> float:
    """Weighted sum of passage scores: sum (overlap / |R_q|) * bm25_p."""
    if rq_size < 1:
        raise ConfigError("rq_size must be >= 1")
    return sum((overlap / rq_size) * score for overlap, score in passage_parts)


def score_passage_weighted(
    qa: QueryAnalysis,
    passage_index: InvertedIndex,
    params: RankingParams,
    run_tag: str = "run",
) -> list[RunEntry] | None:
    """Relation-weighted passage ranking; None marks an NA topic (empty R_q)."""
    if passage_index.space is not TermSpace.RELATION:
        raise ConfigError("passage scoring requires a RELATION-space index")
    if passage_index.granularity != "passage":
        raise ConfigError("passage scoring requires a passage-granularity index")
    rq = qa.relation_set
    if not rq:
        return None
    if passage_index.N == 0:
        raise ConfigError("cannot score against an empty index")

    overlap: dict[str, int] = {}
    passage_bm25: dict[str, float] = {}
    for term in sorted(rq):
        weight = idf(passage_index, term)
        for posting in passage_index.lookup(term):
            length = passage_index.units[posting.unit_id].length
            overlap[posting.unit_id] = overlap.get(posting.unit_id, 0) + 1
            passage_bm25[posting.unit_id] = passage_bm25.get(posting.unit_id, 0.0) + (
                weight * _tf_part(posting.tf, length, passage_index, params)
            )

    doc_parts: dict[str, list[tuple[int, float]]] = {}
    for unit_id, count in overlap.items():
        parent = passage_index.units[unit_id].parent_doc_id
        doc_parts.setdefault(parent, []).append((count, passage_bm25[unit_id]))

    ranked = sorted(
        (
            (doc_id, s)
            for doc_id, parts in doc_parts.items()
            if (s := eq1_document_score(parts, len(rq))) > 0.0
        ),
        key=lambda kv: (-kv[1], kv[0]),
    )[: params.top_k]
    return [
        RunEntry(qa.topic_id, doc_id, rank, score, run_tag)
        for rank, (doc_id, score) in enumerate(ranked, 1)
    ]
