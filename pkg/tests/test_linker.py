import io

import pytest

from oracles import greedy_match_spans
from semrel.errors import FormatError
from semrel.kb import load_kb
from semrel.linker import build_lexicon, link, read_mentions, write_mentions
from semrel.pipeline import document_sentences
from semrel.textproc import TextOptions, split_sentences


def _sentence(text):
    (sentence,) = split_sentences(text)
    return sentence


def test_lexicon_keys_from_synonyms():
    kb = load_kb(
        io.StringIO("C1|heart attack|P\nC1|myocardial infarction|S\n"),
        io.StringIO(""),
    )
    lex = build_lexicon(kb)
    assert set(lex.entries) == {"heart attack", "myocardial infarction"}
    assert lex.entries["heart attack"] == frozenset({"C1"})
    assert lex.max_phrase_len == 2


def test_shared_synonym_keeps_both_cuis(lexicon):
    assert lexicon.entries["cold"] == frozenset({"C005", "C006"})


def test_fixture_lexicon_has_23_keys(lexicon, fixtures_dir):
    # oracle: distinct normalized synonym strings in the snapshot file
    import re

    distinct = set()
    for line in (fixtures_dir / "kb_concepts.psv").read_text().splitlines():
        if not line or line.startswith("#"):
            continue
        _, string, _ = line.split("|")
        distinct.add(" ".join(re.findall(r"[a-z0-9]+(?:['-][a-z0-9]+)*", string.lower())))
    assert len(lexicon.entries) == len(distinct) == 23
    assert lexicon.max_phrase_len == max(len(k.split()) for k in distinct) == 3


def test_longest_match_wins(lexicon):
    sentence = _sentence("heart attack treated with aspirin")
    mentions = link(sentence, lexicon, "T")
    assert [(m.cui, m.token_start, m.token_end) for m in mentions] == [
        ("C001", 0, 1),
        ("C002", 4, 4),
    ]
    assert mentions[0].matched_string == "heart attack"


def test_no_keys_no_mentions(lexicon):
    assert link(_sentence("nothing relevant here"), lexicon, "T") == []


def test_ambiguous_key_emits_all_cuis_on_same_span(lexicon):
    mentions = link(_sentence("a cold morning"), lexicon, "T")
    assert [(m.cui, m.token_start, m.token_end) for m in mentions] == [
        ("C005", 1, 1),
        ("C006", 1, 1),
    ]


def test_fixture_d3_s0_has_three_mentions(corpus, lexicon):
    d3 = next(d for d in corpus if d.doc_id == "D3")
    s0 = document_sentences(d3)[0]
    mentions = link(s0, lexicon, "D3")
    assert len(mentions) == 3
    assert {m.cui for m in mentions} == {"C003", "C004", "C009"}
    # brute-force n-gram scan oracle over the same sentence
    words = [t.normalized for t in s0.tokens]
    spans = greedy_match_spans(words, set(lexicon.entries), lexicon.max_phrase_len)
    assert [(m.token_start, m.token_end) for m in mentions] == spans


def test_linker_agrees_with_span_oracle_on_whole_fixture(corpus, lexicon):
    for doc in corpus:
        for sentence in document_sentences(doc):
            mentions = link(sentence, lexicon, doc.doc_id)
            words = [t.normalized for t in sentence.tokens]
            spans = greedy_match_spans(words, set(lexicon.entries), lexicon.max_phrase_len)
            assert sorted({(m.token_start, m.token_end) for m in mentions}) == spans


def test_mentions_never_overlap(corpus, lexicon):
    for doc in corpus:
        for sentence in document_sentences(doc):
            spans = sorted(
                {(m.token_start, m.token_end) for m in link(sentence, lexicon, doc.doc_id)}
            )
            for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
                assert e1 < s2


def test_matched_string_normalizes_to_a_key(corpus, lexicon):
    opts = TextOptions()
    for doc in corpus:
        for sentence in document_sentences(doc):
            for m in link(sentence, lexicon, doc.doc_id):
                key = " ".join(
                    opts.match_term(w) for w in m.matched_string.lower().split()
                )
                assert key in lexicon.entries


def test_linking_is_deterministic(corpus, lexicon):
    d5 = next(d for d in corpus if d.doc_id == "D5")
    (sentence,) = document_sentences(d5)
    assert link(sentence, lexicon, "D5") == link(sentence, lexicon, "D5")


def test_case_insensitive_matching(lexicon):
    mentions = link(_sentence("ASPIRIN lowered risk"), lexicon, "T")
    assert [m.cui for m in mentions] == ["C002"]
    assert mentions[0].matched_string == "ASPIRIN"


def test_stemmed_matching_is_symmetric(kb):
    opts = TextOptions(stemming=True)
    lex = build_lexicon(kb, opts)
    mentions = link(_sentence("recurrent strokes were rare"), lexicon=lex, text_id="T", opts=opts)
    assert [m.cui for m in mentions] == ["C009"]


def test_mention_file_round_trip(corpus, lexicon, tmp_path):
    d3 = next(d for d in corpus if d.doc_id == "D3")
    mentions = []
    for sentence in document_sentences(d3):
        mentions.extend(link(sentence, lexicon, "D3"))
    buf = io.StringIO()
    write_mentions(mentions, buf, comments=["config abc"])
    assert read_mentions(io.StringIO(buf.getvalue())) == mentions


def test_mention_file_bad_span_errors():
    with pytest.raises(FormatError, match="line 1"):
        read_mentions(io.StringIO("D1\t0\tC1\t4\t2\tfoo\n"))
