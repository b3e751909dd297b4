"""Flat `key = value` configuration, mirroring the retrieval engine's style."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping

from .formats import FormatError


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ClassifierConfig:
    sentences: str = "out/sentences.tsv"
    mentions: str = "out/mentions.tsv"
    kb_concepts: str = "fixtures/kb_concepts.psv"
    kb_relations: str = "fixtures/kb_relations.psv"
    embeddings: str = ""
    pairs: str = "out/learned/pairs.tsv"
    model: str = "out/learned/model.pt"
    annotations_out: str = "out/learned/annotations.tsv"
    negative_ratio: float = 1.0
    threshold: float = 0.5
    max_dist: int = 30
    max_len: int = 60
    embedding_dim: int = 200
    pos_dim: int = 16
    hidden_size: int = 128
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 40
    seed: int = 7

    def validate(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold outside [0,1]: {self.threshold}")
        if self.negative_ratio < 0:
            raise ConfigError(f"negative_ratio must be >= 0, got {self.negative_ratio}")
        for name in ("max_dist", "max_len", "embedding_dim", "pos_dim",
                     "hidden_size", "batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")

    def hash(self) -> str:
        lines = [f"{f.name} = {getattr(self, f.name)}" for f in fields(self)]
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()[:12]


_FIELD_TYPES = {f.name: f.type for f in fields(ClassifierConfig)}


def _coerce(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: bad value {raw!r}") from None
    return raw.strip()


def parse_config(stream: Iterable[str]) -> dict[str, object]:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise FormatError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = _coerce(key.strip(), value.strip())
    return values


def load_config(
    path: str | Path | None = None, overrides: Mapping[str, str] | None = None
) -> ClassifierConfig:
    config = ClassifierConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            config = replace(config, **parse_config(fh))
    if overrides:
        config = replace(config, **{k: _coerce(k, v) for k, v in overrides.items()})
    config.validate()
    return config
