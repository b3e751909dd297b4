"""Command line: build-data, train, predict.

Consumes the retrieval engine's sentence/mention files and the KB
snapshot; emits annotations in the shared tab-separated format. The
pairs file written by build-data is the training artifact:

    text_id  sent  subj_cui  s_start  s_end  obj_cui  o_start  o_end  label  tokens
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import IO, Iterable

from .config import ClassifierConfig, ConfigError, load_config
from .dataset import (
    NO_RELATION,
    PairExample,
    Vocabulary,
    collect_pairs,
    encode_pairs,
    subsample_negatives,
)
from .embeddings import load_text_embeddings
from .formats import FormatError, read_kb, read_mentions, read_sentences, write_annotations
from .model import ModelConfig, load_model, save_model
from .predicting import predict
from .training import TrainingError, train

ENV_CONFIG = "RELCLS_CONFIG"


def _read(path: str):
    return open(path, encoding="utf-8", errors="replace")


def _load_inputs(cfg: ClassifierConfig):
    with _read(cfg.sentences) as fh:
        sentences = read_sentences(fh)
    with _read(cfg.mentions) as fh:
        mentions = read_mentions(fh)
    return sentences, mentions


def _load_kb(cfg: ClassifierConfig):
    with _read(cfg.kb_concepts) as c, _read(cfg.kb_relations) as r:
        return read_kb(c, r)


def write_pairs(pairs: Iterable[PairExample], stream: IO[str], comments: Iterable[str] = ()) -> None:
    for comment in comments:
        stream.write(f"# {comment}\n")
    for p in pairs:
        stream.write(
            f"{p.text_id}\t{p.sentence_index}\t{p.subject_cui}\t{p.subject_span[0]}\t"
            f"{p.subject_span[1]}\t{p.object_cui}\t{p.object_span[0]}\t{p.object_span[1]}\t"
            f"{p.label}\t{' '.join(p.tokens)}\n"
        )


def read_pairs(stream: Iterable[str]) -> list[PairExample]:
    pairs = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 10:
            raise FormatError(f"pairs line {lineno}: expected 10 fields")
        text_id, sent_s, subj, ss, se, obj, os_, oe, label, tokens = parts
        try:
            pairs.append(
                PairExample(
                    text_id, int(sent_s), subj, (int(ss), int(se)),
                    obj, (int(os_), int(oe)), tuple(tokens.split()), label,
                )
            )
        except ValueError:
            raise FormatError(f"pairs line {lineno}: bad integer field") from None
    return pairs


def cmd_build_data(cfg: ClassifierConfig) -> None:
    sentences, mentions = _load_inputs(cfg)
    kb = _load_kb(cfg)
    positives, candidates = collect_pairs(sentences, mentions, kb)
    if not positives:
        raise TrainingError("distant supervision produced no positive examples")
    negatives = subsample_negatives(candidates, len(positives), cfg.negative_ratio, cfg.seed)
    path = Path(cfg.pairs)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_pairs(positives + negatives, fh, [f"config {cfg.hash()}"])
    print(
        f"build-data: {len(positives)} positives, {len(negatives)} negatives "
        f"(of {len(candidates)} candidates) -> {path}"
    )


def cmd_train(cfg: ClassifierConfig) -> None:
    with _read(cfg.pairs) as fh:
        pairs = read_pairs(fh)
    kb = _load_kb(cfg)
    vocab = Vocabulary.from_token_lists(p.tokens for p in pairs)
    pretrained = None
    embedding_dim = cfg.embedding_dim
    if cfg.embeddings:
        with _read(cfg.embeddings) as fh:
            pretrained, embedding_dim = load_text_embeddings(fh)
    model_config = ModelConfig(
        labels=[NO_RELATION, *kb.predicates()],
        vocab_words=vocab.id_to_word[2:],
        embedding_dim=embedding_dim,
        pos_dim=cfg.pos_dim,
        hidden_size=cfg.hidden_size,
        max_dist=cfg.max_dist,
        max_len=cfg.max_len,
        learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size,
        epochs=cfg.epochs,
        seed=cfg.seed,
    )
    examples = encode_pairs(pairs, vocab, cfg.max_dist, cfg.max_len)
    model, history = train(examples, model_config, pretrained)
    save_model(model, cfg.model)
    final = history[-1]
    print(
        f"train: {len(examples)} examples, {len(model_config.labels)} labels, "
        f"epoch {final['epoch']} loss {final['loss']:.4f} "
        f"acc {final['accuracy']:.3f} -> {cfg.model}"
    )


def cmd_predict(cfg: ClassifierConfig) -> None:
    model = load_model(cfg.model)
    sentences, mentions = _load_inputs(cfg)
    rows = predict(model, sentences, mentions, threshold=cfg.threshold)
    path = Path(cfg.annotations_out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_annotations(rows, fh, [f"config {cfg.hash()}"])
    print(f"predict: {len(rows)} instances at threshold {cfg.threshold} -> {path}")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"config file (default ${ENV_CONFIG})")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key")
    parser = argparse.ArgumentParser(
        prog="relation-classifier",
        description="Distantly supervised sentence-level relation classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build-data", parents=[common], help="write the pairs file")
    sub.add_parser("train", parents=[common], help="train and save the model")
    sub.add_parser("predict", parents=[common], help="write learned annotations")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {}
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 4
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    try:
        cfg = load_config(args.config or os.environ.get(ENV_CONFIG) or None, overrides)
        if args.command == "build-data":
            cmd_build_data(cfg)
        elif args.command == "train":
            cmd_train(cfg)
        elif args.command == "predict":
            cmd_predict(cfg)
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename}", file=sys.stderr)
        return 2
    except FormatError as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 4
    except (TrainingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
