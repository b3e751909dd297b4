"""BiLSTM relation classifier.

Word embeddings concatenated with two positional embeddings feed a
bidirectional LSTM; a max-pool over time (padding masked via packed
sequences) feeds the output layer. Padding can never influence a
prediction: the recurrence only sees real tokens and pooled positions
beyond the sequence length are masked out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import torch
from torch import nn

from .dataset import NO_RELATION, PAD_ID, TrainingExample, Vocabulary


@dataclass
class ModelConfig:
    labels: list[str]
    vocab_words: list[str] = field(default_factory=list)
    embedding_dim: int = 200
    pos_dim: int = 16
    hidden_size: int = 128
    max_dist: int = 30
    max_len: int = 60
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 40
    seed: int = 7

    def __post_init__(self):
        if NO_RELATION not in self.labels:
            self.labels = [NO_RELATION, *self.labels]
        self.labels = [NO_RELATION] + sorted(l for l in self.labels if l != NO_RELATION)


class RelationClassifier(nn.Module):
    def __init__(self, config: ModelConfig, pretrained: dict[str, list[float]] | None = None):
        super().__init__()
        self.config = config
        vocab_size = len(config.vocab_words) + 2  # <pad>, <unk>
        n_pos = 2 * config.max_dist + 1
        self.word_emb = nn.Embedding(vocab_size, config.embedding_dim, padding_idx=PAD_ID)
        self.pos1_emb = nn.Embedding(n_pos + 1, config.pos_dim, padding_idx=n_pos)
        self.pos2_emb = nn.Embedding(n_pos + 1, config.pos_dim, padding_idx=n_pos)
        self.pos_pad_id = n_pos
        self.encoder = nn.LSTM(
            config.embedding_dim + 2 * config.pos_dim,
            config.hidden_size,
            batch_first=True,
            bidirectional=True,
        )
        self.out = nn.Linear(2 * config.hidden_size, len(config.labels))
        if pretrained:
            self._load_pretrained(pretrained)

    def _load_pretrained(self, vectors: dict[str, list[float]]) -> None:
        with torch.no_grad():
            for word_id, word in enumerate(["<pad>", "<unk>", *self.config.vocab_words]):
                vec = vectors.get(word)
                if vec is not None:
                    self.word_emb.weight[word_id] = torch.tensor(vec)

    def forward(
        self, tokens: torch.Tensor, pos1: torch.Tensor, pos2: torch.Tensor,
        lengths: torch.Tensor,
    ) -> torch.Tensor:
        embedded = torch.cat(
            [self.word_emb(tokens), self.pos1_emb(pos1), self.pos2_emb(pos2)], dim=-1
        )
        packed = nn.utils.rnn.pack_padded_sequence(
            embedded, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        encoded, _ = self.encoder(packed)
        unpacked, _ = nn.utils.rnn.pad_packed_sequence(encoded, batch_first=True)
        mask = torch.arange(unpacked.size(1)).unsqueeze(0) >= lengths.unsqueeze(1)
        unpacked = unpacked.masked_fill(mask.unsqueeze(-1), float("-inf"))
        pooled, _ = unpacked.max(dim=1)
        return self.out(pooled)

    def batch_tensors(
        self, examples: Sequence[TrainingExample]
    ) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
        """Pad a batch; padded slots get PAD_ID / positional pad ids."""
        width = max(len(e.token_ids) for e in examples)
        tokens = torch.full((len(examples), width), PAD_ID, dtype=torch.long)
        pos1 = torch.full((len(examples), width), self.pos_pad_id, dtype=torch.long)
        pos2 = torch.full((len(examples), width), self.pos_pad_id, dtype=torch.long)
        lengths = torch.zeros(len(examples), dtype=torch.long)
        for row, e in enumerate(examples):
            n = len(e.token_ids)
            tokens[row, :n] = torch.tensor(e.token_ids, dtype=torch.long)
            pos1[row, :n] = torch.tensor(e.pos1, dtype=torch.long)
            pos2[row, :n] = torch.tensor(e.pos2, dtype=torch.long)
            lengths[row] = n
        return tokens, pos1, pos2, lengths

    @torch.no_grad()
    def predict_proba(self, examples: Sequence[TrainingExample]) -> torch.Tensor:
        self.eval()
        logits = self(*self.batch_tensors(examples))
        return torch.softmax(logits, dim=-1)


def save_model(model: RelationClassifier, path: str | Path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "state_dict": model.state_dict(),
        "config": vars(model.config),
    }
    torch.save(payload, path)


def load_model(path: str | Path) -> RelationClassifier:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    config = ModelConfig(**payload["config"])
    model = RelationClassifier(config)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model


def make_vocabulary(config: ModelConfig) -> Vocabulary:
    return Vocabulary(config.vocab_words)
