"""Prediction over mention pairs; emits the shared annotation format.

Relations are directed, so both orientations of every co-occurring pair
are scored; an orientation contributes an annotation when its argmax is
a real predicate with probability at or above the threshold.
"""

from __future__ import annotations

from .dataset import NO_RELATION, PairExample, encode_pairs, first_spans
from .formats import AnnotationRow, Mention, SentenceKey
from .model import RelationClassifier, make_vocabulary


def candidate_orientations(
    sentences: dict[SentenceKey, list[str]],
    mentions: dict[SentenceKey, list[Mention]],
) -> list[PairExample]:
    """Both ordered orientations of every distinct CUI pair per sentence."""
    pairs = []
    for key in sorted(mentions):
        tokens = tuple(sentences.get(key, ()))
        if not tokens:
            continue
        spans = first_spans(mentions[key])
        cuis = sorted(spans)
        for i, a in enumerate(cuis):
            for b in cuis[i + 1 :]:
                for subj, obj in ((a, b), (b, a)):
                    pairs.append(
                        PairExample(
                            key[0], key[1], subj, spans[subj], obj, spans[obj],
                            tokens, NO_RELATION,
                        )
                    )
    return pairs


def predict(
    model: RelationClassifier,
    sentences: dict[SentenceKey, list[str]],
    mentions: dict[SentenceKey, list[Mention]],
    threshold: float = 0.5,
    batch_size: int = 128,
) -> list[AnnotationRow]:
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold outside [0,1]: {threshold}")
    pairs = candidate_orientations(sentences, mentions)
    vocab = make_vocabulary(model.config)
    encoded = encode_pairs(pairs, vocab, model.config.max_dist, model.config.max_len)
    rows = []
    for start in range(0, len(encoded), batch_size):
        batch = encoded[start : start + batch_size]
        probs = model.predict_proba(batch)
        for example, dist in zip(batch, probs):
            best = int(dist.argmax())
            label = model.config.labels[best]
            confidence = float(dist[best])
            if label == NO_RELATION or confidence < threshold:
                continue
            text_id, sentence_index, subject_cui, object_cui = example.provenance
            rows.append(
                AnnotationRow(
                    text_id=text_id,
                    sentence_index=sentence_index,
                    subject_cui=subject_cui,
                    predicate=label,
                    object_cui=object_cui,
                    confidence=round(confidence, 6),
                )
            )
    return rows
