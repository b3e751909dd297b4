"""Command-line pipeline: ingest, link, extract, index, search, batch, eval, compare.

Every stage writes its artifact plus a one-line summary on stdout.
Artifacts embed the config hash in a header comment and contain no
timestamps, so identical inputs produce byte-identical outputs.

Exit codes: 0 ok, 1 other error, 2 missing input file, 3 malformed
input, 4 invalid flag combination.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import pipeline, report
from .config import GRANULARITIES, REPRESENTATIONS, PipelineConfig, load_config
from .corpus_io import (
    parse_ohsumed_corpus,
    parse_qrels,
    parse_run,
    parse_topics,
    write_run,
)
from .errors import ConfigError, FormatError, SemrelError
from .evaluation import EvalParams, compare_reports, evaluate_run
from .index import TermSpace, build_index, load_index, save_index
from .kb import load_kb
from .linker import build_lexicon, read_mentions, write_mentions
from .ranker import RankingParams, rank_documents, score_passage_weighted
from .relext import read_annotations, write_annotations
from .textproc import TextOptions, default_stopwords

ENV_CONFIG = "SEMREL_CONFIG"


def _open_text(path: str | Path):
    """Data files are UTF-8 with lossy replacement of stray bytes."""
    return open(path, encoding="utf-8", errors="replace")


def _text_options(cfg: PipelineConfig) -> TextOptions:
    return TextOptions(
        stemming=cfg.stemming,
        stop_words=default_stopwords() if cfg.stopwords else frozenset(),
    )


def _ranking_params(cfg: PipelineConfig) -> RankingParams:
    return RankingParams(
        k1=cfg.k1, b=cfg.b, top_k=cfg.top_k, passage_len=cfg.passage_len
    )


def _header(cfg: PipelineConfig) -> list[str]:
    return [f"config {cfg.hash()}"]


def _load_corpus(cfg: PipelineConfig):
    with _open_text(cfg.corpus) as fh:
        return parse_ohsumed_corpus(fh)


def _load_topics(cfg: PipelineConfig):
    with _open_text(cfg.topics) as fh:
        return parse_topics(fh)


def _load_kb(cfg: PipelineConfig):
    with _open_text(cfg.kb_concepts) as c, _open_text(cfg.kb_relations) as r:
        return load_kb(c, r)


def _write(path: Path, writer) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer(fh)


def cmd_ingest(cfg: PipelineConfig) -> None:
    docs = _load_corpus(cfg)
    topics = _load_topics(cfg)
    with _open_text(cfg.qrels) as fh:
        qrels = parse_qrels(fh)
    no_abstract = sum(1 for d in docs if not d.abstract)
    print(
        f"ingest: {len(docs)} documents ({no_abstract} title-only), "
        f"{len(topics)} topics, {len(qrels)} judgments"
    )


def cmd_link(cfg: PipelineConfig) -> None:
    docs = _load_corpus(cfg)
    topics = _load_topics(cfg)
    kb = _load_kb(cfg)
    opts = _text_options(cfg)
    lexicon = build_lexicon(kb, opts)

    texts = [(d.doc_id, pipeline.document_sentences(d)) for d in docs]
    texts += [(t.topic_id, pipeline.topic_sentences(t)) for t in topics]
    mentions = []
    n_sentences = 0
    for text_id, sentences in texts:
        n_sentences += len(sentences)
        mentions.extend(pipeline.link_sentences(text_id, sentences, lexicon, opts))

    mentions_path = cfg.mentions_path()
    _write(mentions_path, lambda fh: write_mentions(mentions, fh, _header(cfg)))
    _write(
        cfg.sentences_path(),
        lambda fh: pipeline.write_sentence_tokens(texts, fh, _header(cfg)),
    )
    print(
        f"link: {len(mentions)} mentions over {n_sentences} sentences "
        f"({len(texts)} texts) -> {mentions_path}"
    )


def cmd_extract(cfg: PipelineConfig, from_file: str | None = None) -> None:
    annotations_path = Path(cfg.annotations)
    if from_file is not None:
        with _open_text(from_file) as fh:
            instances = read_annotations(fh)
        source = f"validated {from_file}"
    else:
        kb = _load_kb(cfg)
        with _open_text(cfg.mentions_path()) as fh:
            mentions = read_mentions(fh)
        instances = pipeline.extract_sentences(mentions, kb)
        source = "rule-based"
    _write(annotations_path, lambda fh: write_annotations(instances, fh, _header(cfg)))
    print(f"extract: {len(instances)} instances ({source}) -> {annotations_path}")


def _load_doc_artifacts(cfg: PipelineConfig, docs):
    doc_ids = {d.doc_id for d in docs}
    mentions = []
    instances = []
    if cfg.representation == "boc":
        with _open_text(cfg.mentions_path()) as fh:
            mentions = [m for m in read_mentions(fh) if m.text_id in doc_ids]
    if cfg.representation == "bor":
        with _open_text(cfg.annotations) as fh:
            instances = [r for r in read_annotations(fh) if r.text_id in doc_ids]
    return mentions, instances


def cmd_index(cfg: PipelineConfig) -> None:
    docs = _load_corpus(cfg)
    mentions, instances = _load_doc_artifacts(cfg, docs)
    space, units = pipeline.build_units(
        cfg.representation,
        cfg.granularity,
        docs,
        mentions=mentions,
        instances=instances,
        opts=_text_options(cfg),
        passage_len=cfg.passage_len,
    )
    index = build_index(units, space, cfg.granularity)
    index_path = cfg.index_path()
    _write(index_path, lambda fh: save_index(index, fh, _header(cfg)))
    print(
        f"index: {space.value} {cfg.granularity} units={index.N} "
        f"terms={len(index.terms())} -> {index_path}"
    )


def _analyze_topics(cfg: PipelineConfig, topics, query_annotations: str | None):
    kb = _load_kb(cfg)
    opts = _text_options(cfg)
    lexicon = build_lexicon(kb, opts)
    external = None
    if query_annotations is not None:
        with _open_text(query_annotations) as fh:
            external = read_annotations(fh)
    return [
        pipeline.analyze_topic(t, lexicon, kb, opts, relation_instances=external)
        for t in topics
    ]


def cmd_search(cfg: PipelineConfig, query_annotations: str | None = None) -> None:
    with _open_text(cfg.index_path()) as fh:
        index = load_index(fh)
    topics = _load_topics(cfg)
    params = _ranking_params(cfg)
    run_tag = cfg.run_tag()

    if cfg.representation == "bow":
        opts = _text_options(cfg)
        analyses = [
            pipeline.analyze_topic_words(t, opts) for t in topics
        ]
    else:
        analyses = _analyze_topics(cfg, topics, query_annotations)

    entries = []
    na_topics = []
    for qa in analyses:
        if cfg.representation == "bor" and not qa.relation_set:
            na_topics.append(qa.topic_id)
            continue
        if cfg.granularity == "passage":
            result = score_passage_weighted(qa, index, params, run_tag)
            if result is None:
                na_topics.append(qa.topic_id)
                continue
        else:
            result = rank_documents(qa, index, params, run_tag)
        entries.extend(result)

    run_path = cfg.run_path()
    _write(run_path, lambda fh: write_run(entries, fh, _header(cfg)))
    if cfg.representation == "bor":
        na_path = Path(str(run_path) + ".na")

        def write_na(fh):
            for comment in _header(cfg):
                fh.write(f"# {comment}\n")
            for topic_id in sorted(na_topics):
                fh.write(f"NA {topic_id}\n")

        _write(na_path, write_na)
    with_results = len({e.topic_id for e in entries})
    print(
        f"search: {len(topics)} topics, {with_results} with results, "
        f"{len(na_topics)} NA -> {run_path}"
    )


def _read_na_sidecar(run_path: Path) -> list[str]:
    na_path = Path(str(run_path) + ".na")
    if not na_path.exists():
        return []
    na_topics = []
    with _open_text(na_path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or parts[0] != "NA":
                raise FormatError(f"{na_path} line {lineno}: expected 'NA <topic_id>'")
            na_topics.append(parts[1])
    return na_topics


def _evaluate_file(cfg: PipelineConfig, run_path: Path):
    with _open_text(run_path) as fh:
        entries = parse_run(fh)
    with _open_text(cfg.qrels) as fh:
        qrels = parse_qrels(fh)
    na_topics = _read_na_sidecar(run_path)
    tag = entries[0].run_tag if entries else run_path.stem
    return evaluate_run(
        entries, qrels, EvalParams(cutoff=cfg.cutoff), na_topics, run_tag=tag
    )


def cmd_eval(cfg: PipelineConfig, run_file: str | None = None) -> None:
    run_path = Path(run_file) if run_file else cfg.run_path()
    result = _evaluate_file(cfg, run_path)
    base = Path(str(run_path).removesuffix(".run"))
    txt = base.with_name(base.name + ".eval.txt")
    tsv = base.with_name(base.name + ".eval.tsv")
    png = base.with_name(base.name + ".eval.png")
    _write(txt, lambda fh: fh.write(report.format_eval_report(result, _header(cfg))))
    _write(tsv, lambda fh: fh.write(report.report_lines_tsv([result], _header(cfg))))
    report.render_topic_bars([result], png, title=f"nDCG per topic ({result.run_tag})")
    evaluated = sum(1 for v in result.values.values() if v is not None)
    try:
        mean = f"{result.mean():.6f}"
    except SemrelError:
        mean = "NA"
    print(
        f"eval: mean nDCG {mean} over {evaluated} topics "
        f"({len(result.na_topics)} NA) -> {txt}"
    )


def cmd_compare(
    cfg: PipelineConfig, run_a: str, run_b: str, only_nonzero_a: bool = False
) -> None:
    report_a = _evaluate_file(cfg, Path(run_a))
    report_b = _evaluate_file(cfg, Path(run_b))
    cmp = compare_reports(report_a, report_b, only_nonzero_a=only_nonzero_a)
    table = report.format_compare_report(cmp, _header(cfg))
    sys.stdout.write(table)

    def safe(tag: str) -> str:
        return tag.replace("/", "_").replace(" ", "_")

    stem = f"compare.{safe(report_a.run_tag)}_vs_{safe(report_b.run_tag)}"
    base = Path(cfg.run_dir)
    _write(base / f"{stem}.txt", lambda fh: fh.write(table))
    _write(
        base / f"{stem}.tsv",
        lambda fh: fh.write(report.report_lines_tsv([report_a, report_b], _header(cfg))),
    )
    report.render_topic_bars(
        [report_a, report_b],
        base / f"{stem}.png",
        title=f"nDCG per topic ({report_a.run_tag} vs {report_b.run_tag})",
    )
    print(f"compare: wrote {base / f'{stem}.txt'}")


def cmd_batch(cfg: PipelineConfig) -> None:
    cmd_ingest(cfg)
    cmd_link(cfg)
    cmd_extract(cfg)
    cmd_index(cfg)
    cmd_search(cfg)
    cmd_eval(cfg)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (default ${ENV_CONFIG})")
    for key in (
        "corpus", "topics", "qrels", "kb-concepts", "kb-relations",
        "annotations", "index-dir", "run-dir", "k1", "b", "top-k",
        "passage-len", "cutoff",
    ):
        common.add_argument(f"--{key}", dest=key.replace("-", "_"))
    common.add_argument("--stemming", choices=("on", "off"))
    common.add_argument("--stopwords", choices=("on", "off"))
    common.add_argument("--representation", choices=REPRESENTATIONS)
    common.add_argument("--granularity", choices=GRANULARITIES)

    parser = argparse.ArgumentParser(
        prog="semrel",
        description="Case-based medical literature retrieval pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="parse and validate inputs")
    sub.add_parser("link", parents=[common], help="write mention and sentence files")
    p_extract = sub.add_parser("extract", parents=[common], help="write annotations")
    p_extract.add_argument(
        "--from-file", help="ingest an externally produced annotation file"
    )
    sub.add_parser("index", parents=[common], help="build the persisted index")
    p_search = sub.add_parser("search", parents=[common], help="rank topics, write run")
    p_search.add_argument(
        "--query-annotations", help="annotation file supplying query relations"
    )
    sub.add_parser("batch", parents=[common], help="full pipeline plus evaluation")
    p_eval = sub.add_parser("eval", parents=[common], help="evaluate a run file")
    p_eval.add_argument("--run", help="run file (default: configured run path)")
    p_compare = sub.add_parser("compare", parents=[common], help="compare two runs")
    p_compare.add_argument("run_a")
    p_compare.add_argument("run_b")
    p_compare.add_argument(
        "--only-nonzero-a",
        action="store_true",
        help="drop topics where the first run's nDCG is 0",
    )
    return parser


_CONFIG_KEYS = (
    "corpus", "topics", "qrels", "kb_concepts", "kb_relations", "annotations",
    "index_dir", "run_dir", "k1", "b", "top_k", "passage_len", "cutoff",
    "stemming", "stopwords", "representation", "granularity",
)


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    path = args.config or os.environ.get(ENV_CONFIG) or None
    overrides = {
        key: value
        for key in _CONFIG_KEYS
        if (value := getattr(args, key, None)) is not None
    }
    cfg = load_config(path, overrides)
    cfg.validate()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "ingest":
            cmd_ingest(cfg)
        elif args.command == "link":
            cmd_link(cfg)
        elif args.command == "extract":
            cmd_extract(cfg, from_file=args.from_file)
        elif args.command == "index":
            cmd_index(cfg)
        elif args.command == "search":
            cmd_search(cfg, query_annotations=args.query_annotations)
        elif args.command == "batch":
            cmd_batch(cfg)
        elif args.command == "eval":
            cmd_eval(cfg, run_file=args.run)
        elif args.command == "compare":
            cmd_compare(cfg, args.run_a, args.run_b, args.only_nonzero_a)
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 4
    except SemrelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
