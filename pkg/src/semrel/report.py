"""Evaluation reports: aligned text tables, per-line TSV, bar figures.

Figures mirror the tables: one bar per topic and run, topics sorted in
descending score order (first run, then second), NA topics last.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .errors import InsufficientDataError
from .evaluation import Comparison, EvalReport


def _fmt(value: float | None) -> str:
    return "NA" if value is None else f"{value:.6f}"


def _sort_topics(reports: Sequence[EvalReport]) -> list[str]:
    topics = sorted({t for r in reports for t in r.values})

    def key(topic_id: str):
        ranks = []
        for r in reports:
            v = r.values.get(topic_id)
            ranks.append(-v if v is not None else 1.0)
        return (*ranks, topic_id)

    return sorted(topics, key=key)


def _mean_line(report: EvalReport) -> str:
    try:
        mean = f"{report.mean():.6f}"
    except InsufficientDataError:
        mean = "NA"
    return f"mean({report.run_tag}) = {mean} over {sum(1 for v in report.values.values() if v is not None)} topics, {len(report.na_topics)} NA"


def format_eval_report(report: EvalReport, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    width = max([len(t) for t in report.values] + [len("topic")])
    lines.append(f"{'topic':<{width}}  {report.run_tag}")
    for topic_id in report.topics:
        lines.append(f"{topic_id:<{width}}  {_fmt(report.values[topic_id])}")
    lines.append(_mean_line(report))
    return "\n".join(lines) + "\n"


def format_compare_report(cmp: Comparison, comments: Sequence[str] = ()) -> str:
    a, b = cmp.report_a, cmp.report_b
    lines = [f"# {c}" for c in comments]
    topics = sorted(set(a.values) | set(b.values))
    width = max([len(t) for t in topics] + [len("topic")])
    cols = (a.run_tag, b.run_tag, "delta")
    lines.append(
        f"{'topic':<{width}}  {cols[0]:>12}  {cols[1]:>12}  {cols[2]:>12}"
    )
    for topic_id in topics:
        va = a.values.get(topic_id)
        vb = b.values.get(topic_id)
        delta = _fmt(va - vb) if va is not None and vb is not None else "NA"
        lines.append(
            f"{topic_id:<{width}}  {_fmt(va):>12}  {_fmt(vb):>12}  {delta:>12}"
        )
    lines.append(_mean_line(a))
    lines.append(_mean_line(b))
    lines.append(f"paired topics: {len(cmp.paired_topics)}")
    if cmp.ttest is None:
        lines.append("t-test: insufficient data (fewer than 2 paired topics)")
    else:
        lines.append(
            f"t-test: t = {cmp.ttest.t:.6f}, df = {cmp.ttest.df}, p = {cmp.ttest.p:.6f}"
        )
    return "\n".join(lines) + "\n"


def report_lines_tsv(reports: Sequence[EvalReport], comments: Sequence[str] = ()) -> str:
    """Machine-readable form: topic_id, run_tag, value-or-NA per line."""
    lines = [f"# {c}" for c in comments]
    topics = sorted({t for r in reports for t in r.values})
    for topic_id in topics:
        for report in reports:
            if topic_id in report.values:
                lines.append(
                    f"{topic_id}\t{report.run_tag}\t{_fmt(report.values[topic_id])}"
                )
    return "\n".join(lines) + "\n"


def render_topic_bars(
    reports: Sequence[EvalReport], path: str | Path, title: str = "nDCG per topic"
) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    topics = _sort_topics(reports)
    n_runs = len(reports)
    group = 0.8
    bar_width = group / n_runs
    fig_width = max(6.0, 0.5 * len(topics) + 2.0)
    fig, ax = plt.subplots(figsize=(fig_width, 4.0))
    for r_i, report in enumerate(reports):
        xs, ys = [], []
        na_xs = []
        for t_i, topic_id in enumerate(topics):
            x = t_i - group / 2 + (r_i + 0.5) * bar_width
            value = report.values.get(topic_id)
            if value is None:
                na_xs.append(x)
            else:
                xs.append(x)
                ys.append(value)
        ax.bar(xs, ys, width=bar_width * 0.9, label=report.run_tag)
        for x in na_xs:
            ax.text(x, 0.01, "NA", rotation=90, ha="center", va="bottom", fontsize=7)
    ax.set_xticks(range(len(topics)))
    ax.set_xticklabels(topics, rotation=90, fontsize=8)
    ax.set_ylabel("nDCG")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
