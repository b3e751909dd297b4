"""Glue between parsing, linking, extraction, and indexing.

Builds the per-space term multisets for documents, passages, and
queries. Queries are always exactly two sentences (title, description)
and never go through the sentence splitter.
"""

from __future__ import annotations

from collections import Counter
from typing import IO, Iterable, Mapping

from .corpus_io import Document, Topic
from .errors import FormatError
from .index import TermSpace
from .kb import KnowledgeBase
from .linker import ConceptMention, Lexicon, link
from .ranker import QueryAnalysis
from .relext import RelationInstance, extract_rule_based, relation_token
from .textproc import (
    Sentence,
    TextOptions,
    segment_passages,
    split_sentences,
    tokenize,
)

_DEFAULT_OPTS = TextOptions()


def document_sentences(doc: Document) -> list[Sentence]:
    return split_sentences(doc.text())


def topic_sentences(topic: Topic) -> list[Sentence]:
    """Title and description as sentences 0 and 1, splitter bypassed."""
    text = topic.text()
    title_end = len(topic.title)
    tokens = tokenize(text)
    title_tokens = tuple(t for t in tokens if t.start < title_end)
    desc_tokens = tuple(t for t in tokens if t.start >= title_end)
    sentences = []
    if topic.title.strip():
        sentences.append(Sentence(0, 0, title_end, title_tokens))
    sentences.append(
        Sentence(len(sentences), title_end + 1, len(text), desc_tokens)
    )
    return sentences


def word_counts(sentences: Iterable[Sentence], opts: TextOptions = _DEFAULT_OPTS) -> Counter:
    counts: Counter = Counter()
    for sentence in sentences:
        for token in sentence.tokens:
            term = opts.term(token.normalized)
            if term is not None:
                counts[term] += 1
    return counts


def link_sentences(
    text_id: str,
    sentences: Iterable[Sentence],
    lexicon: Lexicon,
    opts: TextOptions = _DEFAULT_OPTS,
) -> list[ConceptMention]:
    mentions = []
    for sentence in sentences:
        mentions.extend(link(sentence, lexicon, text_id, opts))
    return mentions


def extract_sentences(
    mentions: Iterable[ConceptMention], kb: KnowledgeBase
) -> list[RelationInstance]:
    """Rule-based extraction, one sentence at a time."""
    by_sentence: dict[tuple[str, int], list[ConceptMention]] = {}
    for m in mentions:
        by_sentence.setdefault((m.text_id, m.sentence_index), []).append(m)
    instances = []
    for key in sorted(by_sentence):
        instances.extend(extract_rule_based(by_sentence[key], kb))
    return instances


def concept_counts(mentions: Iterable[ConceptMention]) -> Counter:
    return Counter(m.cui for m in mentions)


def relation_counts(
    instances: Iterable[RelationInstance],
    sentence_range: tuple[int, int] | None = None,
) -> Counter:
    """tf of a relation token = number of distinct sentences yielding it."""
    seen = set()
    for inst in instances:
        if sentence_range is not None:
            lo, hi = sentence_range
            if not lo <= inst.sentence_index <= hi:
                continue
        seen.add((inst.sentence_index, relation_token(inst)))
    counts: Counter = Counter()
    for _, token in seen:
        counts[token] += 1
    return counts


def word_units(
    docs: Iterable[Document], opts: TextOptions = _DEFAULT_OPTS
) -> list[tuple[str, str, Counter]]:
    return [
        (doc.doc_id, doc.doc_id, word_counts(document_sentences(doc), opts))
        for doc in docs
    ]


def concept_units(
    docs: Iterable[Document], mentions: Iterable[ConceptMention]
) -> list[tuple[str, str, Counter]]:
    by_doc: dict[str, list[ConceptMention]] = {}
    for m in mentions:
        by_doc.setdefault(m.text_id, []).append(m)
    return [
        (doc.doc_id, doc.doc_id, concept_counts(by_doc.get(doc.doc_id, ())))
        for doc in docs
    ]


def relation_units(
    docs: Iterable[Document], instances: Iterable[RelationInstance]
) -> list[tuple[str, str, Counter]]:
    by_doc = _instances_by_text(instances)
    return [
        (doc.doc_id, doc.doc_id, relation_counts(by_doc.get(doc.doc_id, ())))
        for doc in docs
    ]


def passage_relation_units(
    docs: Iterable[Document],
    instances: Iterable[RelationInstance],
    passage_len: int,
) -> list[tuple[str, str, Counter]]:
    """One unit per passage of every document, empty passages included."""
    by_doc = _instances_by_text(instances)
    units = []
    for doc in docs:
        sentences = document_sentences(doc)
        doc_instances = by_doc.get(doc.doc_id, [])
        n_sentences = len(sentences)
        for inst in doc_instances:
            if inst.sentence_index >= n_sentences:
                raise FormatError(
                    f"annotation for {doc.doc_id} names sentence "
                    f"{inst.sentence_index} but the document has {n_sentences}"
                )
        for passage in segment_passages(doc.doc_id, sentences, passage_len):
            counts = relation_counts(
                doc_instances, (passage.sentence_start, passage.sentence_end)
            )
            units.append((passage.passage_id, doc.doc_id, counts))
    return units


def _instances_by_text(
    instances: Iterable[RelationInstance],
) -> dict[str, list[RelationInstance]]:
    by_text: dict[str, list[RelationInstance]] = {}
    for inst in instances:
        by_text.setdefault(inst.text_id, []).append(inst)
    return by_text


def analyze_topic(
    topic: Topic,
    lexicon: Lexicon,
    kb: KnowledgeBase,
    opts: TextOptions = _DEFAULT_OPTS,
    relation_instances: Iterable[RelationInstance] | None = None,
) -> QueryAnalysis:
    """Per-space query terms; R_q deduplicates tokens across both sentences.

    When relation_instances is given (an external annotation source) it
    replaces rule-based extraction for the relation space.
    """
    sentences = topic_sentences(topic)
    mentions = link_sentences(topic.topic_id, sentences, lexicon, opts)
    if relation_instances is None:
        instances = extract_sentences(mentions, kb)
    else:
        instances = [r for r in relation_instances if r.text_id == topic.topic_id]
    relation_terms = {relation_token(r): 1 for r in instances}
    return QueryAnalysis(
        topic_id=topic.topic_id,
        word_terms=dict(word_counts(sentences, opts)),
        concept_terms=dict(concept_counts(mentions)),
        relation_terms=relation_terms,
    )


def analyze_topic_words(topic: Topic, opts: TextOptions = _DEFAULT_OPTS) -> QueryAnalysis:
    """Word-space-only analysis; needs no knowledge base."""
    return QueryAnalysis(
        topic_id=topic.topic_id,
        word_terms=dict(word_counts(topic_sentences(topic), opts)),
    )


def build_units(
    representation: str,
    granularity: str,
    docs: list[Document],
    mentions: Iterable[ConceptMention] = (),
    instances: Iterable[RelationInstance] = (),
    opts: TextOptions = _DEFAULT_OPTS,
    passage_len: int = 2,
) -> tuple[TermSpace, list[tuple[str, str, Counter]]]:
    if representation == "bow":
        space = TermSpace.WORD
        units = word_units(docs, opts)
    elif representation == "boc":
        space = TermSpace.CONCEPT
        units = concept_units(docs, mentions)
    elif representation == "bor":
        space = TermSpace.RELATION
        if granularity == "passage":
            units = passage_relation_units(docs, instances, passage_len)
        else:
            units = relation_units(docs, instances)
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return space, units


def write_sentence_tokens(
    texts: Iterable[tuple[str, list[Sentence]]],
    stream: IO[str],
    comments: Iterable[str] = (),
) -> None:
    """Sidecar consumed by external extractors: id, sentence, tokens."""
    for comment in comments:
        stream.write(f"# {comment}\n")
    for text_id, sentences in texts:
        for sentence in sentences:
            tokens = " ".join(t.normalized for t in sentence.tokens)
            stream.write(f"{text_id}\t{sentence.index}\t{tokens}\n")
