"""Learning-behavior checks: overfit, separable patterns, shuffled labels."""

import random

import pytest
import torch

from relation_classifier.dataset import NO_RELATION, Vocabulary, encode_pairs
from relation_classifier.model import ModelConfig
from relation_classifier.training import TrainingError, accuracy, train
from synthetic import VERB_LABELS, make_pairs

LABELS = sorted(set(VERB_LABELS.values()) - {NO_RELATION})


def _encode(pairs, vocab):
    return encode_pairs(pairs, vocab, max_dist=10, max_len=20)


def _config(vocab, **overrides):
    defaults = dict(
        labels=list(LABELS),
        vocab_words=vocab.id_to_word[2:],
        embedding_dim=24,
        pos_dim=8,
        hidden_size=32,
        max_dist=10,
        max_len=20,
        learning_rate=0.02,
        batch_size=32,
        epochs=60,
        seed=11,
    )
    defaults.update(overrides)
    return ModelConfig(**defaults)


@pytest.fixture(scope="module")
def separable():
    train_pairs = make_pairs(400, seed=5)
    held_out = make_pairs(200, seed=99)
    vocab = Vocabulary.from_token_lists(p.tokens for p in train_pairs)
    return train_pairs, held_out, vocab


def test_overfit_32_examples(separable):
    train_pairs, _, vocab = separable
    subset = _encode(train_pairs[:32], vocab)
    config = _config(vocab, epochs=200)
    model, history = train(subset, config)
    assert any(h["accuracy"] >= 0.99 for h in history)
    assert accuracy(model, subset) >= 0.99


def test_separable_patterns_generalize(separable):
    train_pairs, held_out, vocab = separable
    model, _ = train(_encode(train_pairs, vocab), _config(vocab))
    held = _encode(held_out, vocab)
    assert accuracy(model, held) >= 0.95


def test_shuffled_labels_sit_at_chance(separable):
    train_pairs, held_out, vocab = separable
    rng = random.Random(13)
    labels = [p.label for p in train_pairs]
    rng.shuffle(labels)
    from dataclasses import replace

    shuffled = [replace(p, label=label) for p, label in zip(train_pairs, labels)]
    model, _ = train(_encode(shuffled, vocab), _config(vocab, epochs=30))
    held = _encode(held_out, vocab)
    chance = 1.0 / len(model.config.labels)
    assert abs(accuracy(model, held) - chance) <= 0.1


def test_fixed_seed_reproduces_loss_trajectory(separable):
    train_pairs, _, vocab = separable
    subset = _encode(train_pairs[:64], vocab)
    config = _config(vocab, epochs=5)
    torch.set_num_threads(1)
    _, first = train(subset, config)
    _, second = train(subset, config)
    for a, b in zip(first, second):
        assert a["loss"] == pytest.approx(b["loss"], rel=1e-6)


def test_unknown_label_is_training_error(separable):
    train_pairs, _, vocab = separable
    examples = _encode(train_pairs[:8], vocab)
    config = _config(vocab, labels=["treats"])  # causes/prevents missing
    with pytest.raises(TrainingError, match="outside the label set"):
        train(examples, config)


def test_empty_training_set_is_error(separable):
    _, _, vocab = separable
    with pytest.raises(TrainingError, match="empty"):
        train([], _config(vocab))
