import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "fixtures"
KB_DIR = HERE.parent.parent / "fixtures"

sys.path.insert(0, str(HERE))

from relation_classifier.formats import read_kb, read_mentions, read_sentences


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def kb_dir() -> Path:
    return KB_DIR


@pytest.fixture(scope="session")
def sentences():
    with open(FIXTURES / "sentences.tsv", encoding="utf-8") as fh:
        return read_sentences(fh)


@pytest.fixture(scope="session")
def mentions():
    with open(FIXTURES / "mentions.tsv", encoding="utf-8") as fh:
        return read_mentions(fh)


@pytest.fixture(scope="session")
def kb():
    with open(KB_DIR / "kb_concepts.psv", encoding="utf-8") as c:
        with open(KB_DIR / "kb_relations.psv", encoding="utf-8") as r:
            return read_kb(c, r)
