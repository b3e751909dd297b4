"""Tokenization, sentence segmentation, and passage segmentation.

Shared by documents and queries. Tokens are maximal alphanumeric runs
(internal hyphens and apostrophes allowed). Sentences split after . ! ?
followed by whitespace and an uppercase letter (or end of text), with an
abbreviation guard for periods.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import ConfigError
from .stem import porter_stem

_TOKEN_RE = re.compile(r"[^\W_]+(?:['’-][^\W_]+)*", re.UNICODE)
_TERMINATOR_RE = re.compile(r"[.!?]")
# word preceding a period, possibly with internal periods ("e.g")
_GUARD_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:\.[A-Za-z0-9]+)*$")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    start: int
    end: int


@dataclass(frozen=True)
class Sentence:
    index: int
    start: int
    end: int
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class Passage:
    doc_id: str
    passage_id: str
    sentence_start: int
    sentence_end: int


@dataclass(frozen=True)
class TextOptions:
    """Normalization switches shared by indexing and linking."""

    stemming: bool = False
    stop_words: frozenset[str] = frozenset()

    def term(self, normalized: str) -> str | None:
        """Word-space term for a normalized token; None drops it."""
        if normalized in self.stop_words:
            return None
        return porter_stem(normalized) if self.stemming else normalized

    def match_term(self, normalized: str) -> str:
        """Linker-side form; stopwords never apply to phrase matching."""
        return porter_stem(normalized) if self.stemming else normalized


def _read_resource_words(name: str) -> frozenset[str]:
    text = resources.files("semrel.resources").joinpath(name).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line.rstrip("."))
    return frozenset(words)


@lru_cache(maxsize=None)
def default_abbreviations() -> frozenset[str]:
    return _read_resource_words("abbreviations.txt")


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return _read_resource_words("stopwords.txt")


def tokenize(text: str) -> list[Token]:
    return [
        Token(m.group(), m.group().lower(), m.start(), m.end())
        for m in _TOKEN_RE.finditer(text)
    ]


def _boundary_positions(text: str, abbrevs: frozenset[str]) -> list[int]:
    cuts = []
    for m in _TERMINATOR_RE.finditer(text):
        i = m.end()
        tail = text[i:]
        if tail.strip():
            if i < len(text) and not text[i].isspace():
                continue
            j = i
            while j < len(text) and text[j].isspace():
                j += 1
            if not text[j].isupper():
                continue
        if m.group() == ".":
            w = _GUARD_WORD_RE.search(text, 0, m.start())
            if w:
                word = w.group()
                if len(word) == 1 and word.isupper():
                    continue
                if word.lower() in abbrevs:
                    continue
        cuts.append(i)
    return cuts


def split_sentences(text: str, abbreviations: frozenset[str] | None = None) -> list[Sentence]:
    """Split text into sentences; tokens of all sentences partition tokenize(text)."""
    if not text.strip():
        return []
    abbrevs = default_abbreviations() if abbreviations is None else abbreviations
    bounds = _boundary_positions(text, abbrevs)
    if not bounds or bounds[-1] < len(text):
        bounds = bounds + [len(text)]
    tokens = tokenize(text)
    sentences = []
    ti = 0
    prev = 0
    for b in bounds:
        seg = text[prev:b]
        sent_tokens = []
        while ti < len(tokens) and tokens[ti].start < b:
            sent_tokens.append(tokens[ti])
            ti += 1
        if seg.strip():
            start = prev + (len(seg) - len(seg.lstrip()))
            end = prev + len(seg.rstrip())
            sentences.append(
                Sentence(len(sentences), start, end, tuple(sent_tokens))
            )
        prev = b
    return sentences


def segment_passages(doc_id: str, sentences: list[Sentence], length: int) -> list[Passage]:
    """Disjoint blocks of `length` consecutive sentences; the last may be short."""
    if length < 1:
        raise ConfigError(f"passage length must be >= 1, got {length}")
    passages = []
    for block, start in enumerate(range(0, len(sentences), length)):
        end = min(start + length, len(sentences)) - 1
        passages.append(Passage(doc_id, f"{doc_id}#{block}", start, end))
    return passages
