import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from semrel.corpus_io import parse_ohsumed_corpus, parse_qrels, parse_topics
from semrel.kb import load_kb
from semrel.linker import build_lexicon

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def corpus():
    with open(FIXTURES / "corpus.ohsu", encoding="utf-8") as fh:
        return parse_ohsumed_corpus(fh)


@pytest.fixture(scope="session")
def topics():
    with open(FIXTURES / "topics.txt", encoding="utf-8") as fh:
        return parse_topics(fh)


@pytest.fixture(scope="session")
def qrels():
    with open(FIXTURES / "qrels.txt", encoding="utf-8") as fh:
        return parse_qrels(fh)


@pytest.fixture(scope="session")
def kb():
    with open(FIXTURES / "kb_concepts.psv", encoding="utf-8") as c:
        with open(FIXTURES / "kb_relations.psv", encoding="utf-8") as r:
            return load_kb(c, r)


@pytest.fixture(scope="session")
def lexicon(kb):
    return build_lexicon(kb)
