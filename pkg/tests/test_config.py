import io

import pytest

from semrel.config import PipelineConfig, load_config, parse_config
from semrel.errors import ConfigError, FormatError


def test_defaults_validate():
    PipelineConfig().validate()


def test_parse_key_value_lines():
    text = "# comment\nk1 = 0.9\nrepresentation = bow\nstemming = on\ntop_k = 50\n"
    values = parse_config(io.StringIO(text))
    assert values == {"k1": 0.9, "representation": "bow", "stemming": True, "top_k": 50}


def test_unknown_key_rejected():
    with pytest.raises(ConfigError, match="unknown configuration key"):
        parse_config(io.StringIO("who = knows\n"))


def test_bad_boolean_rejected():
    with pytest.raises(ConfigError, match="on/off"):
        parse_config(io.StringIO("stemming = maybe\n"))


def test_line_without_equals_is_malformed():
    with pytest.raises(FormatError, match="line 1"):
        parse_config(io.StringIO("just words\n"))


def test_overrides_beat_file(tmp_path):
    path = tmp_path / "semrel.conf"
    path.write_text("k1 = 0.5\nb = 0.5\n")
    cfg = load_config(path, {"k1": "2.0", "granularity": "doc"})
    assert cfg.k1 == 2.0
    assert cfg.b == 0.5
    assert cfg.granularity == "doc"


def test_passage_granularity_requires_bor():
    cfg = load_config(None, {"representation": "bow", "granularity": "passage"})
    with pytest.raises(ConfigError, match="passage granularity"):
        cfg.validate()


def test_hash_stable_and_sensitive():
    base = PipelineConfig()
    assert base.hash() == PipelineConfig().hash()
    changed = load_config(None, {"k1": "1.3"})
    assert changed.hash() != base.hash()
    assert len(base.hash()) == 12


def test_artifact_paths():
    cfg = PipelineConfig()
    assert str(cfg.index_path()).endswith("bor.passage.idx")
    assert cfg.run_path().name == "topics.bor.passage.run"
    assert cfg.run_tag() == "bor.passage"
    assert cfg.mentions_path().name == "mentions.tsv"
