"""nDCG computation, topic aggregation with NA handling, paired t-test.

A topic is NA when it cannot be scored: no relevant document in the
pool, or (for the relation representation) no extractable query
relations, which arrives here through the na_topics argument. NA topics
never enter means and are dropped pairwise before significance testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from scipy.stats import t as t_dist

from .corpus_io import QrelEntry, RunEntry
from .errors import FormatError, InsufficientDataError


@dataclass(frozen=True)
class EvalParams:
    cutoff: int = 1000

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float


@dataclass(frozen=True)
class EvalReport:
    run_tag: str
    values: Mapping[str, float | None]

    @property
    def topics(self) -> list[str]:
        return sorted(self.values)

    @property
    def na_topics(self) -> list[str]:
        return sorted(t for t, v in self.values.items() if v is None)

    def mean(self) -> float:
        return mean_ndcg(self.values.values())


def _gain(grade: int) -> float:
    return float(2**grade - 1)


def _discount(position: int) -> float:
    return 1.0 / math.log2(position + 1)


def ndcg(
    run: Sequence[RunEntry],
    qrels: Mapping[str, int],
    params: EvalParams = EvalParams(),
) -> float | None:
    """nDCG at the cutoff; None (NA) when the pool has no relevant document.

    `run` holds one topic's entries sorted by rank; unjudged documents
    count as grade 0.
    """
    for position, entry in enumerate(run, 1):
        if entry.rank != position:
            raise FormatError(
                f"run for topic {entry.topic_id} is not sorted 1..k "
                f"(rank {entry.rank} at position {position})"
            )
    ideal = sorted(qrels.values(), reverse=True)
    idcg = sum(
        _gain(g) * _discount(i)
        for i, g in enumerate(ideal[: params.cutoff], 1)
    )
    if idcg == 0.0:
        return None
    dcg = sum(
        _gain(qrels.get(entry.doc_id, 0)) * _discount(i)
        for i, entry in enumerate(run[: params.cutoff], 1)
    )
    return dcg / idcg


def mean_ndcg(values: Iterable[float | None]) -> float:
    actual = [v for v in values if v is not None]
    if not actual:
        raise InsufficientDataError("all topics are NA; nothing to average")
    return sum(actual) / len(actual)


def evaluate_run(
    entries: Iterable[RunEntry],
    qrels: Iterable[QrelEntry],
    params: EvalParams = EvalParams(),
    na_topics: Iterable[str] = (),
    run_tag: str | None = None,
) -> EvalReport:
    """Per-topic nDCG over the union of judged and retrieved topics."""
    pools: dict[str, dict[str, int]] = {}
    for q in qrels:
        pools.setdefault(q.topic_id, {})[q.doc_id] = q.grade
    by_topic: dict[str, list[RunEntry]] = {}
    tag = run_tag
    for e in entries:
        by_topic.setdefault(e.topic_id, []).append(e)
        if tag is None:
            tag = e.run_tag
    forced_na = set(na_topics)
    values: dict[str, float | None] = {}
    for topic_id in sorted(set(pools) | set(by_topic) | forced_na):
        if topic_id in forced_na:
            values[topic_id] = None
            continue
        run = sorted(by_topic.get(topic_id, []), key=lambda e: e.rank)
        values[topic_id] = ndcg(run, pools.get(topic_id, {}), params)
    return EvalReport(tag or "run", values)


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Two-tailed paired t-test on aligned, NA-free score lists."""
    if len(a) != len(b):
        raise ValueError(f"unaligned inputs: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {n}")
    diffs = [x - y for x, y in zip(a, b)]
    mean = math.fsum(diffs) / n
    var = math.fsum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, df, 1.0)
        return TTestResult(math.copysign(math.inf, mean), df, 0.0)
    t = mean / (sd / math.sqrt(n))
    p = 2.0 * float(t_dist.sf(abs(t), df))
    return TTestResult(t, df, p)


@dataclass(frozen=True)
class Comparison:
    report_a: EvalReport
    report_b: EvalReport
    paired_topics: list[str]
    ttest: TTestResult | None


def compare_reports(
    report_a: EvalReport,
    report_b: EvalReport,
    only_nonzero_a: bool = False,
) -> Comparison:
    """Pairwise-drop NA topics; optionally keep only topics where A is nonzero.

    The t-test is omitted (None) when fewer than two pairs survive.
    """
    topics = sorted(set(report_a.values) | set(report_b.values))
    paired = []
    for topic_id in topics:
        va = report_a.values.get(topic_id)
        vb = report_b.values.get(topic_id)
        if va is None or vb is None:
            continue
        if only_nonzero_a and va == 0.0:
            continue
        paired.append(topic_id)
    if len(paired) >= 2:
        ttest = paired_t_test(
            [report_a.values[t] for t in paired],
            [report_b.values[t] for t in paired],
        )
    else:
        ttest = None
    return Comparison(report_a, report_b, paired, ttest)
