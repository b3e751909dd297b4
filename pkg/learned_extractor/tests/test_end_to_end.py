"""CLI pipeline on the fixture and the cross-component round trip."""

import io
from pathlib import Path

import pytest

from relation_classifier.cli import main, read_pairs
from relation_classifier.dataset import NO_RELATION

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
KB_DIR = Path(__file__).resolve().parent.parent.parent / "fixtures"


def _run(tmp_path, command, **extra):
    settings = {
        "sentences": FIXTURES / "sentences.tsv",
        "mentions": FIXTURES / "mentions.tsv",
        "kb_concepts": KB_DIR / "kb_concepts.psv",
        "kb_relations": KB_DIR / "kb_relations.psv",
        "pairs": tmp_path / "pairs.tsv",
        "model": tmp_path / "model.pt",
        "annotations_out": tmp_path / "learned.tsv",
        "embedding_dim": 16,
        "pos_dim": 4,
        "hidden_size": 16,
        "epochs": 120,
        "learning_rate": 0.05,
        "seed": 3,
        **extra,
    }
    args = [command]
    for key, value in settings.items():
        args += ["--set", f"{key}={value}"]
    return main(args)


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory, capsys_unused=None):
    tmp_path = tmp_path_factory.mktemp("e2e")
    assert _run(tmp_path, "build-data") == 0
    assert _run(tmp_path, "train") == 0
    assert _run(tmp_path, "predict") == 0
    return tmp_path


def test_pairs_file_round_trip(artifacts):
    pairs = read_pairs(open(artifacts / "pairs.tsv", encoding="utf-8"))
    assert pairs, "build-data produced no pairs"
    positives = [p for p in pairs if p.label != NO_RELATION]
    negatives = [p for p in pairs if p.label == NO_RELATION]
    assert positives and negatives
    buf = io.StringIO()
    from relation_classifier.cli import write_pairs

    write_pairs(pairs, buf)
    assert read_pairs(io.StringIO(buf.getvalue())) == pairs


def test_predict_writes_thresholded_learned_rows(artifacts):
    lines = [
        line
        for line in (artifacts / "learned.tsv").read_text().splitlines()
        if line and not line.startswith("#")
    ]
    assert lines, "the memorized fixture model should emit instances"
    for line in lines:
        fields = line.split("\t")
        assert len(fields) == 7
        assert fields[3] != NO_RELATION
        assert fields[5] == "learned"
        assert 0.5 <= float(fields[6]) <= 1.0


def test_missing_input_exit_code(tmp_path):
    rc = _run(tmp_path, "build-data", sentences=tmp_path / "missing.tsv")
    assert rc == 2


def test_bad_config_value_exit_code(tmp_path):
    rc = _run(tmp_path, "train", threshold="2.0")
    assert rc == 4


def test_round_trip_through_primary(artifacts):
    semrel_relext = pytest.importorskip("semrel.relext")
    from semrel.corpus_io import parse_ohsumed_corpus, parse_run, parse_topics, write_run
    from semrel.index import TermSpace, build_index
    from semrel.kb import load_kb
    from semrel.linker import build_lexicon
    from semrel.pipeline import analyze_topic, passage_relation_units
    from semrel.ranker import RankingParams, score_passage_weighted

    # the learned file must pass the primary's strict reader
    with open(artifacts / "learned.tsv", encoding="utf-8") as fh:
        instances = semrel_relext.read_annotations(fh)
    assert instances
    assert all(r.source == "learned" for r in instances)

    with open(KB_DIR / "corpus.ohsu", encoding="utf-8") as fh:
        corpus = parse_ohsumed_corpus(fh)
    with open(KB_DIR / "topics.txt", encoding="utf-8") as fh:
        topics = parse_topics(fh)
    with open(KB_DIR / "kb_concepts.psv", encoding="utf-8") as c:
        with open(KB_DIR / "kb_relations.psv", encoding="utf-8") as r:
            kb = load_kb(c, r)
    lexicon = build_lexicon(kb)

    doc_ids = {d.doc_id for d in corpus}
    doc_instances = [r for r in instances if r.text_id in doc_ids]
    units = passage_relation_units(corpus, doc_instances, passage_len=2)
    index = build_index(units, TermSpace.RELATION, granularity="passage")

    params = RankingParams()
    entries = []
    scored_topics = 0
    for topic in topics:
        qa = analyze_topic(topic, lexicon, kb, relation_instances=instances)
        result = score_passage_weighted(qa, index, params, "bor.passage.learned")
        if result is None:
            continue
        scored_topics += 1
        entries.extend(result)
    assert scored_topics >= 1, "learned relations matched no topic"
    assert entries, "learned relations matched no documents"

    buf = io.StringIO()
    write_run(entries, buf)
    parsed = parse_run(io.StringIO(buf.getvalue()))
    expected = sorted(entries, key=lambda e: (e.topic_id, e.rank))
    assert [(e.topic_id, e.doc_id, e.rank, e.run_tag) for e in parsed] == [
        (e.topic_id, e.doc_id, e.rank, e.run_tag) for e in expected
    ]
    for got, want in zip(parsed, expected):
        assert got.score == pytest.approx(want.score, abs=5e-7)
