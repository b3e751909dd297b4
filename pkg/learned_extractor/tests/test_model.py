import io

import pytest
import torch

from relation_classifier.dataset import NO_RELATION, TrainingExample, Vocabulary
from relation_classifier.embeddings import load_text_embeddings
from relation_classifier.formats import FormatError
from relation_classifier.model import (
    ModelConfig,
    RelationClassifier,
    load_model,
    save_model,
)


def _config(**overrides):
    defaults = dict(
        labels=["treats", "causes"],
        vocab_words=[f"w{i}" for i in range(20)],
        embedding_dim=12,
        pos_dim=4,
        hidden_size=8,
        max_dist=5,
        max_len=16,
        seed=1,
    )
    defaults.update(overrides)
    return ModelConfig(**defaults)


def _example(ids, label="treats"):
    n = len(ids)
    return TrainingExample(
        token_ids=tuple(ids),
        pos1=tuple(min(i, 10) for i in range(n)),
        pos2=tuple(min(i, 10) for i in range(n)),
        label=label,
        provenance=("D", 0, "C1", "C2"),
    )


def test_label_set_normalized_with_no_relation_first():
    config = _config()
    assert config.labels[0] == NO_RELATION
    assert config.labels == [NO_RELATION, "causes", "treats"]
    again = _config(labels=["treats", NO_RELATION, "causes"])
    assert again.labels == config.labels


def test_probabilities_sum_to_one():
    torch.manual_seed(0)
    model = RelationClassifier(_config())
    batch = [_example([2, 3, 4]), _example([5, 6, 7, 8, 9])]
    probs = model.predict_proba(batch)
    assert probs.shape == (2, 3)
    assert torch.allclose(probs.sum(dim=-1), torch.ones(2), atol=1e-6)


def test_padding_content_never_changes_outputs():
    torch.manual_seed(0)
    model = RelationClassifier(_config())
    batch = [_example([2, 3, 4]), _example([5, 6, 7, 8, 9])]
    tokens, pos1, pos2, lengths = model.batch_tensors(batch)
    base = model(tokens, pos1, pos2, lengths)
    # garbage in the padded tail of the short sequence
    tokens2 = tokens.clone()
    pos12 = pos1.clone()
    pos22 = pos2.clone()
    tokens2[0, 3:] = 17
    pos12[0, 3:] = 3
    pos22[0, 3:] = 9
    perturbed = model(tokens2, pos12, pos22, lengths)
    assert torch.allclose(base, perturbed, atol=0.0)


def test_batch_tensors_pad_ids():
    model = RelationClassifier(_config())
    batch = [_example([2, 3, 4]), _example([5, 6])]
    tokens, pos1, pos2, lengths = model.batch_tensors(batch)
    assert tokens.shape == (2, 3)
    assert tokens[1, 2].item() == 0  # <pad>
    assert pos1[1, 2].item() == model.pos_pad_id
    assert lengths.tolist() == [3, 2]


def test_save_and_load_round_trip(tmp_path):
    torch.manual_seed(0)
    model = RelationClassifier(_config())
    batch = [_example([2, 3, 4])]
    before = model.predict_proba(batch)
    path = tmp_path / "model.pt"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.config.labels == model.config.labels
    after = loaded.predict_proba(batch)
    assert torch.allclose(before, after, atol=0.0)


def test_pretrained_vectors_loaded_and_oov_random():
    vectors = {"w0": [1.0] * 12, "w3": [2.0] * 12}
    torch.manual_seed(0)
    model = RelationClassifier(_config(), pretrained=vectors)
    weight = model.word_emb.weight.detach()
    assert torch.equal(weight[2], torch.ones(12))  # w0 sits after <pad>, <unk>
    assert torch.equal(weight[5], torch.full((12,), 2.0))
    assert not torch.equal(weight[3], torch.ones(12))  # w1 stays random


def test_embedding_loader_infers_dimension():
    text = "hello 0.1 0.2 0.3\nworld 0.4 0.5 0.6\n"
    vectors, dim = load_text_embeddings(io.StringIO(text))
    assert dim == 3
    assert vectors["world"] == [0.4, 0.5, 0.6]


def test_embedding_loader_skips_word2vec_header():
    text = "2 3\nhello 0.1 0.2 0.3\nworld 0.4 0.5 0.6\n"
    vectors, dim = load_text_embeddings(io.StringIO(text))
    assert len(vectors) == 2 and dim == 3


def test_embedding_loader_rejects_ragged_rows():
    with pytest.raises(FormatError, match="expected 3"):
        load_text_embeddings(io.StringIO("a 1 2 3\nb 1 2\n"))


def test_embedding_loader_rejects_empty():
    with pytest.raises(FormatError, match="no vectors"):
        load_text_embeddings(io.StringIO(""))
