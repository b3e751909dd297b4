"""Distant supervision: align KB triples with sentences to label pairs.

Every unordered CUI pair co-occurring in a sentence becomes one positive
example per KB predicate relating it (in the KB's direction), or a
NO_RELATION candidate otherwise; candidates are subsampled to a ratio of
the positive count with seeded randomness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .formats import Kb, Mention, SentenceKey

NO_RELATION = "NO_RELATION"
PAD_ID = 0
UNK_ID = 1


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class PairExample:
    """A candidate (subject span, object span) pair inside one sentence."""

    text_id: str
    sentence_index: int
    subject_cui: str
    subject_span: tuple[int, int]
    object_cui: str
    object_span: tuple[int, int]
    tokens: tuple[str, ...]
    label: str


@dataclass(frozen=True)
class TrainingExample:
    token_ids: tuple[int, ...]
    pos1: tuple[int, ...]
    pos2: tuple[int, ...]
    label: str
    provenance: tuple[str, int, str, str]

    def __post_init__(self):
        if not (len(self.token_ids) == len(self.pos1) == len(self.pos2)):
            raise DatasetError("token and positional sequences differ in length")


class Vocabulary:
    """Token-to-id map with reserved <pad>=0 and <unk>=1."""

    def __init__(self, words: Sequence[str]):
        self.id_to_word = ["<pad>", "<unk>", *words]
        self.word_to_id = {w: i for i, w in enumerate(self.id_to_word)}

    @classmethod
    def from_token_lists(cls, token_lists: Iterable[Sequence[str]]) -> "Vocabulary":
        return cls(sorted({t for tokens in token_lists for t in tokens}))

    def __len__(self) -> int:
        return len(self.id_to_word)

    def encode(self, tokens: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.word_to_id.get(t, UNK_ID) for t in tokens)


def first_spans(mentions: Sequence[Mention]) -> dict[str, tuple[int, int]]:
    """First-occurring span per CUI (repeated mentions do not multiply pairs)."""
    spans: dict[str, tuple[int, int]] = {}
    for m in sorted(mentions, key=lambda m: (m.token_start, m.token_end, m.cui)):
        spans.setdefault(m.cui, (m.token_start, m.token_end))
    return spans


def collect_pairs(
    sentences: dict[SentenceKey, list[str]],
    mentions: dict[SentenceKey, list[Mention]],
    kb: Kb,
) -> tuple[list[PairExample], list[PairExample]]:
    """All labeled pairs and all NO_RELATION candidates, in deterministic order."""
    positives: list[PairExample] = []
    candidates: list[PairExample] = []
    for key in sorted(mentions):
        if key not in sentences:
            raise DatasetError(f"mentions reference unknown sentence {key}")
        tokens = tuple(sentences[key])
        spans = first_spans(mentions[key])
        cuis = sorted(spans)
        for i, a in enumerate(cuis):
            for b in cuis[i + 1 :]:
                triples = kb.relations_between(a, b)
                if triples:
                    for subj, pred, obj in triples:
                        positives.append(
                            PairExample(
                                key[0], key[1], subj, spans[subj], obj, spans[obj],
                                tokens, pred,
                            )
                        )
                else:
                    first, second = (a, b) if spans[a] <= spans[b] else (b, a)
                    candidates.append(
                        PairExample(
                            key[0], key[1], first, spans[first], second, spans[second],
                            tokens, NO_RELATION,
                        )
                    )
    return positives, candidates


def subsample_negatives(
    candidates: Sequence[PairExample], n_positives: int, ratio: float, seed: int
) -> list[PairExample]:
    target = min(len(candidates), round(ratio * n_positives))
    if target == len(candidates):
        return list(candidates)
    rng = random.Random(seed)
    picked = rng.sample(range(len(candidates)), target)
    return [candidates[i] for i in sorted(picked)]


def relative_positions(
    length: int, span: tuple[int, int], max_dist: int
) -> tuple[int, ...]:
    """Clipped distance of every token to the span, shifted to 0..2*max_dist."""
    start, end = span
    ids = []
    for i in range(length):
        if i < start:
            d = i - start
        elif i > end:
            d = i - end
        else:
            d = 0
        ids.append(max(-max_dist, min(max_dist, d)) + max_dist)
    return tuple(ids)


def encode_pairs(
    pairs: Iterable[PairExample],
    vocab: Vocabulary,
    max_dist: int,
    max_len: int,
) -> list[TrainingExample]:
    """Token ids plus two positional id sequences; long sentences truncated."""
    examples = []
    for pair in pairs:
        tokens = pair.tokens[:max_len]
        if pair.subject_span[0] >= max_len or pair.object_span[0] >= max_len:
            continue
        n = len(tokens)
        examples.append(
            TrainingExample(
                token_ids=vocab.encode(tokens),
                pos1=relative_positions(n, pair.subject_span, max_dist),
                pos2=relative_positions(n, pair.object_span, max_dist),
                label=pair.label,
                provenance=(
                    pair.text_id, pair.sentence_index,
                    pair.subject_cui, pair.object_cui,
                ),
            )
        )
    return examples


def build_distant_dataset(
    sentences: dict[SentenceKey, list[str]],
    mentions: dict[SentenceKey, list[Mention]],
    kb: Kb,
    negative_ratio: float = 1.0,
    seed: int = 7,
    vocab: Vocabulary | None = None,
    max_dist: int = 30,
    max_len: int = 60,
) -> tuple[list[TrainingExample], Vocabulary]:
    positives, candidates = collect_pairs(sentences, mentions, kb)
    if not positives:
        raise DatasetError("distant supervision produced no positive examples")
    negatives = subsample_negatives(candidates, len(positives), negative_ratio, seed)
    pairs = positives + negatives
    if vocab is None:
        vocab = Vocabulary.from_token_lists(sentences.values())
    return encode_pairs(pairs, vocab, max_dist, max_len), vocab
