"""Flat `key = value` pipeline configuration.

Flags override file values; the SEMREL_CONFIG environment variable
names the config file when --config is absent. The canonical rendering
of a config is hashed into every artifact header for provenance.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConfigError, FormatError

REPRESENTATIONS = ("bow", "boc", "bor")
GRANULARITIES = ("doc", "passage")

_BOOL_VALUES = {
    "on": True, "true": True, "yes": True, "1": True,
    "off": False, "false": False, "no": False, "0": False,
}


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str = "fixtures/corpus.ohsu"
    topics: str = "fixtures/topics.txt"
    qrels: str = "fixtures/qrels.txt"
    kb_concepts: str = "fixtures/kb_concepts.psv"
    kb_relations: str = "fixtures/kb_relations.psv"
    annotations: str = "out/annotations.tsv"
    index_dir: str = "out/index"
    run_dir: str = "out/runs"
    k1: float = 1.2
    b: float = 0.75
    top_k: int = 1000
    passage_len: int = 2
    cutoff: int = 1000
    stemming: bool = False
    stopwords: bool = False
    representation: str = "bor"
    granularity: str = "passage"

    def validate(self) -> None:
        if self.representation not in REPRESENTATIONS:
            raise ConfigError(f"representation must be one of {REPRESENTATIONS}")
        if self.granularity not in GRANULARITIES:
            raise ConfigError(f"granularity must be one of {GRANULARITIES}")
        if self.granularity == "passage" and self.representation != "bor":
            raise ConfigError(
                "passage granularity is only defined for the bor representation"
            )
        if self.k1 < 0 or not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"bad BM25 parameters k1={self.k1} b={self.b}")
        for name in ("top_k", "passage_len", "cutoff"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    def canonical_lines(self) -> list[str]:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                value = "on" if value else "off"
            lines.append(f"{f.name} = {value}")
        return lines

    def hash(self) -> str:
        payload = "\n".join(self.canonical_lines()).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:12]

    # derived artifact locations
    def mentions_path(self) -> Path:
        return Path(self.annotations).parent / "mentions.tsv"

    def sentences_path(self) -> Path:
        return Path(self.annotations).parent / "sentences.tsv"

    def index_path(self) -> Path:
        return Path(self.index_dir) / f"{self.representation}.{self.granularity}.idx"

    def run_path(self) -> Path:
        topic_set = Path(self.topics).stem
        return Path(self.run_dir) / (
            f"{topic_set}.{self.representation}.{self.granularity}.run"
        )

    def run_tag(self) -> str:
        return f"{self.representation}.{self.granularity}"


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        value = _BOOL_VALUES.get(raw.strip().lower())
        if value is None:
            raise ConfigError(f"{key}: expected on/off, got {raw!r}")
        return value
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
    path: str | Path | None = None,
    overrides: Mapping[str, str] | None = None,
) -> PipelineConfig:
    config = PipelineConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            config = replace(config, **parse_config(fh))
    if overrides:
        coerced = {key: _coerce(key, value) for key, value in overrides.items()}
        config = replace(config, **coerced)
    return config
