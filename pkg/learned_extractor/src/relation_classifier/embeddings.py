"""Whitespace-separated text-format word vector loading.

Any `word v1 ... vd` file works; an optional word2vec-style count/dim
header line is skipped. Dimension is inferred from the first data row.
Out-of-vocabulary words (and the no-file case) fall back to seeded
uniform initialization in the model.
"""

from __future__ import annotations

from typing import Iterable

from .formats import FormatError


def load_text_embeddings(stream: Iterable[str]) -> tuple[dict[str, list[float]], int]:
    vectors: dict[str, list[float]] = {}
    dim: int | None = None
    for lineno, raw in enumerate(stream, 1):
        parts = raw.split()
        if not parts:
            continue
        if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            continue  # word2vec header: <count> <dim>
        word, values = parts[0], parts[1:]
        if dim is None:
            if not values:
                raise FormatError(f"embeddings line {lineno}: no vector components")
            dim = len(values)
        if len(values) != dim:
            raise FormatError(
                f"embeddings line {lineno}: expected {dim} components, got {len(values)}"
            )
        try:
            vectors[word] = [float(v) for v in values]
        except ValueError:
            raise FormatError(f"embeddings line {lineno}: non-numeric component") from None
    if dim is None:
        raise FormatError("embeddings file holds no vectors")
    return vectors, dim
