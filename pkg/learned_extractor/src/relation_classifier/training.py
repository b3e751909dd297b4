"""Cross-entropy training with seeded shuffling."""

from __future__ import annotations

import math
import random
from typing import Sequence

import torch
from torch import nn

from .dataset import TrainingExample
from .model import ModelConfig, RelationClassifier


class TrainingError(RuntimeError):
    pass


def train(
    examples: Sequence[TrainingExample],
    config: ModelConfig,
    pretrained: dict[str, list[float]] | None = None,
    log=None,
) -> tuple[RelationClassifier, list[dict]]:
    if not examples:
        raise TrainingError("empty training set")
    unknown = {e.label for e in examples} - set(config.labels)
    if unknown:
        raise TrainingError(f"examples carry labels outside the label set: {unknown}")

    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    model = RelationClassifier(config, pretrained)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()
    label_ids = {label: i for i, label in enumerate(config.labels)}

    order = list(range(len(examples)))
    history = []
    for epoch in range(config.epochs):
        model.train()
        rng.shuffle(order)
        total_loss = 0.0
        correct = 0
        for start in range(0, len(order), config.batch_size):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            tokens, pos1, pos2, lengths = model.batch_tensors(batch)
            targets = torch.tensor([label_ids[e.label] for e in batch])
            optimizer.zero_grad()
            logits = model(tokens, pos1, pos2, lengths)
            loss = loss_fn(logits, targets)
            if not math.isfinite(loss.item()):
                raise TrainingError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total_loss += loss.item() * len(batch)
            correct += int((logits.argmax(dim=-1) == targets).sum())
        record = {
            "epoch": epoch,
            "loss": total_loss / len(examples),
            "accuracy": correct / len(examples),
        }
        history.append(record)
        if log is not None:
            log(record)
    model.eval()
    return model, history


def accuracy(model: RelationClassifier, examples: Sequence[TrainingExample]) -> float:
    if not examples:
        raise TrainingError("empty evaluation set")
    label_ids = {label: i for i, label in enumerate(model.config.labels)}
    probs = model.predict_proba(examples)
    predicted = probs.argmax(dim=-1)
    targets = torch.tensor([label_ids[e.label] for e in examples])
    return float((predicted == targets).float().mean())
