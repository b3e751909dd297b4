"""OHSUMED-format corpus, topic, qrels, and TREC run file I/O.

All parsers consume text streams (iterables of lines) and are pure:
same bytes in, same values out. Lines starting with '#' are treated as
comments in qrels and run files (artifact headers carry provenance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable

from .errors import FormatError

_TAG_FIELDS = {
    ".U": "doc_id",
    ".T": "title",
    ".W": "abstract",
    ".M": "mesh",
    ".A": "authors",
    ".S": "source",
    ".P": "pub_type",
}


@dataclass(frozen=True)
class Document:
    doc_id: str
    seq_id: int
    title: str
    abstract: str = ""
    mesh_terms: tuple[str, ...] = ()
    authors: str = ""
    source: str = ""
    pub_type: str = ""

    def text(self) -> str:
        """Retrieval text: title plus abstract when present."""
        return f"{self.title} {self.abstract}" if self.abstract else self.title


@dataclass(frozen=True)
class Topic:
    topic_id: str
    title: str
    description: str

    def text(self) -> str:
        return f"{self.title}\n{self.description}"


@dataclass(frozen=True)
class QrelEntry:
    topic_id: str
    doc_id: str
    grade: int


@dataclass(frozen=True)
class RunEntry:
    topic_id: str
    doc_id: str
    rank: int
    score: float
    run_tag: str


def parse_ohsumed_corpus(stream: Iterable[str]) -> list[Document]:
    """One Document per .I record; tag line and value line alternate."""
    docs = []
    fields: dict[str, str] | None = None
    record_line = 0
    pending: str | None = None

    seen_ids = set()

    def flush() -> None:
        if fields is None:
            return
        if not fields.get("doc_id"):
            raise FormatError(f"line {record_line}: record has no .U identifier")
        if not fields.get("title"):
            raise FormatError(f"line {record_line}: record has no .T title")
        if fields["doc_id"] in seen_ids:
            raise FormatError(
                f"line {record_line}: duplicate document id {fields['doc_id']!r}"
            )
        seen_ids.add(fields["doc_id"])
        mesh = tuple(
            t.strip() for t in fields.get("mesh", "").split(";") if t.strip()
        )
        docs.append(
            Document(
                doc_id=fields["doc_id"],
                seq_id=int(fields["seq"]),
                title=fields["title"],
                abstract=fields.get("abstract", ""),
                mesh_terms=mesh,
                authors=fields.get("authors", ""),
                source=fields.get("source", ""),
                pub_type=fields.get("pub_type", ""),
            )
        )

    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith(".I"):
            flush()
            seq = line[2:].strip()
            if not seq.isdigit():
                raise FormatError(f"line {lineno}: bad .I sequence {seq!r}")
            fields = {"seq": seq}
            record_line = lineno
            pending = None
        elif line in _TAG_FIELDS:
            if fields is None:
                raise FormatError(f"line {lineno}: {line} before any .I record")
            pending = _TAG_FIELDS[line]
        elif pending is not None:
            fields[pending] = line.strip()
            pending = None
        else:
            raise FormatError(f"line {lineno}: unexpected content {line!r}")
    flush()
    return docs


def parse_topics(stream: Iterable[str]) -> list[Topic]:
    """Records delimited by <top>/</top>; <desc> text runs to </top>."""
    topics = []
    cur: dict[str, str] | None = None
    in_desc = False
    record_line = 0
    seen_ids = set()
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if stripped == "<top>":
            cur = {}
            in_desc = False
            record_line = lineno
        elif stripped == "</top>":
            if cur is None:
                raise FormatError(f"line {lineno}: </top> without <top>")
            if not cur.get("num"):
                raise FormatError(f"line {record_line}: topic has no <num> id")
            if not cur.get("title"):
                raise FormatError(f"line {record_line}: topic has no <title>")
            desc = cur.get("desc", "").strip()
            if not desc:
                raise FormatError(
                    f"line {record_line}: topic {cur['num']} has no description"
                )
            if cur["num"] in seen_ids:
                raise FormatError(f"line {record_line}: duplicate topic id {cur['num']!r}")
            seen_ids.add(cur["num"])
            topics.append(Topic(cur["num"], cur["title"], desc))
            cur = None
            in_desc = False
        elif cur is None:
            continue
        elif stripped.startswith("<num>"):
            value = stripped[len("<num>"):].strip()
            if value.startswith("Number:"):
                value = value[len("Number:"):].strip()
            cur["num"] = value
            in_desc = False
        elif stripped.startswith("<title>"):
            cur["title"] = stripped[len("<title>"):].strip()
            in_desc = False
        elif stripped.startswith("<desc>"):
            value = stripped[len("<desc>"):].strip()
            if value.startswith("Description:"):
                value = value[len("Description:"):].strip()
            cur["desc"] = value
            in_desc = True
        elif in_desc:
            cur["desc"] = (cur.get("desc", "") + " " + stripped).strip()
    if cur is not None:
        raise FormatError(f"line {record_line}: unterminated <top> record")
    return topics


def parse_qrels(stream: Iterable[str]) -> list[QrelEntry]:
    entries = []
    seen = set()
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        topic_id, _, doc_id, grade_s = parts
        try:
            grade = int(grade_s)
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer grade {grade_s!r}") from None
        if grade not in (0, 1, 2):
            raise FormatError(f"line {lineno}: grade {grade} outside {{0,1,2}}")
        key = (topic_id, doc_id)
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate judgment for {key}")
        seen.add(key)
        entries.append(QrelEntry(topic_id, doc_id, grade))
    return entries


def validate_run(entries: Iterable[RunEntry]) -> None:
    """Enforce per-topic rank contiguity, score monotonicity, and uniqueness."""
    by_topic: dict[str, list[RunEntry]] = {}
    seen = set()
    for e in entries:
        key = (e.topic_id, e.doc_id)
        if key in seen:
            raise FormatError(f"duplicate document {e.doc_id} for topic {e.topic_id}")
        seen.add(key)
        by_topic.setdefault(e.topic_id, []).append(e)
    for topic_id, rows in by_topic.items():
        rows.sort(key=lambda e: e.rank)
        for pos, e in enumerate(rows, 1):
            if e.rank != pos:
                raise FormatError(
                    f"topic {topic_id}: rank {e.rank} at position {pos} (gaps or duplicates)"
                )
        for prev, cur in zip(rows, rows[1:]):
            if cur.score > prev.score:
                raise FormatError(
                    f"topic {topic_id}: score increases from rank {prev.rank} to {cur.rank}"
                )


def write_run(entries: Iterable[RunEntry], stream: IO[str], comments: Iterable[str] = ()) -> None:
    """TREC 6-column run format, sorted by (topic_id, rank), score at 6 decimals."""
    entries = list(entries)
    validate_run(entries)
    for comment in comments:
        stream.write(f"# {comment}\n")
    for e in sorted(entries, key=lambda e: (e.topic_id, e.rank)):
        stream.write(f"{e.topic_id} Q0 {e.doc_id} {e.rank} {e.score:.6f} {e.run_tag}\n")


def parse_run(stream: Iterable[str]) -> list[RunEntry]:
    entries = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise FormatError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        topic_id, _, doc_id, rank_s, score_s, run_tag = parts
        try:
            rank = int(rank_s)
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer rank {rank_s!r}") from None
        if rank < 1:
            raise FormatError(f"line {lineno}: rank must be positive, got {rank}")
        try:
            score = float(score_s)
        except ValueError:
            raise FormatError(f"line {lineno}: bad score {score_s!r}") from None
        entries.append(RunEntry(topic_id, doc_id, rank, score, run_tag))
    return entries
