"""Dictionary-based entity linking: greedy longest-match over token n-grams.

Spans are matched case-insensitively against the normalized synonym
strings of the KB; an ambiguous string emits one mention per concept on
the same span. Mention files share the tab-separated annotation layout
(key columns first) and carry the token span, which downstream
extractors need for positional features.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Mapping

from .errors import FormatError
from .kb import KnowledgeBase
from .textproc import Sentence, TextOptions, tokenize

_DEFAULT_OPTS = TextOptions()


@dataclass(frozen=True)
class ConceptMention:
    cui: str
    text_id: str
    sentence_index: int
    token_start: int
    token_end: int
    matched_string: str


@dataclass(frozen=True)
class Lexicon:
    entries: Mapping[str, frozenset[str]]
    max_phrase_len: int


def build_lexicon(kb: KnowledgeBase, opts: TextOptions = _DEFAULT_OPTS) -> Lexicon:
    """Every synonym string, tokenized and normalized, keys its concept set."""
    entries: dict[str, set[str]] = {}
    max_len = 0
    for cui in sorted(kb.concepts):
        for synonym in kb.concepts[cui].synonyms:
            words = [opts.match_term(t.normalized) for t in tokenize(synonym)]
            if not words:
                continue
            key = " ".join(words)
            entries.setdefault(key, set()).add(cui)
            max_len = max(max_len, len(words))
    frozen = {key: frozenset(cuis) for key, cuis in entries.items()}
    return Lexicon(frozen, max_len)


def link(
    sentence: Sentence,
    lexicon: Lexicon,
    text_id: str,
    opts: TextOptions = _DEFAULT_OPTS,
) -> list[ConceptMention]:
    """Greedy left-to-right longest match; matched spans never overlap."""
    words = [opts.match_term(t.normalized) for t in sentence.tokens]
    mentions = []
    i = 0
    n = len(words)
    while i < n:
        matched = 0
        for length in range(min(lexicon.max_phrase_len, n - i), 0, -1):
            key = " ".join(words[i : i + length])
            cuis = lexicon.entries.get(key)
            if cuis:
                surface = " ".join(t.surface for t in sentence.tokens[i : i + length])
                for cui in sorted(cuis):
                    mentions.append(
                        ConceptMention(
                            cui=cui,
                            text_id=text_id,
                            sentence_index=sentence.index,
                            token_start=i,
                            token_end=i + length - 1,
                            matched_string=surface,
                        )
                    )
                matched = length
                break
        i += matched if matched else 1
    return mentions


def write_mentions(mentions: Iterable[ConceptMention], stream: IO[str], comments: Iterable[str] = ()) -> None:
    for comment in comments:
        stream.write(f"# {comment}\n")
    for m in mentions:
        stream.write(
            f"{m.text_id}\t{m.sentence_index}\t{m.cui}\t{m.token_start}\t"
            f"{m.token_end}\t{m.matched_string}\n"
        )


def read_mentions(stream: Iterable[str]) -> list[ConceptMention]:
    mentions = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise FormatError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        text_id, sent_s, cui, start_s, end_s, matched = parts
        try:
            sent = int(sent_s)
            start = int(start_s)
            end = int(end_s)
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer position field") from None
        if start > end or start < 0:
            raise FormatError(f"line {lineno}: bad token span {start}..{end}")
        mentions.append(ConceptMention(cui, text_id, sent, start, end, matched))
    return mentions
