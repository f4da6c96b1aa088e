import json
import random

import pytest

from vardef.corpus import (
    Span,
    corpus_stats,
    harvest_pairs,
    load_corpus,
    save_corpus,
)
from vardef.errors import DuplicateDocIdError, InvariantError, ParseError

from conftest import mk_doc, mk_sentence


def write_jsonl(path, *objs):
    path.write_text("\n".join(json.dumps(o) for o in objs) + "\n", encoding="utf-8")


def one_doc_line(**overrides):
    doc = {
        "doc_id": "d1",
        "process_tag": "CSTR",
        "sentences": [
            {
                "text": "C is the concentration.",
                "variables": [
                    {
                        "var_id": "v1",
                        "start": 0,
                        "end": 1,
                        "definition": {"start": 9, "end": 22},
                        "is_target": True,
                    }
                ],
            }
        ],
    }
    doc.update(overrides)
    return doc


def test_load_single_doc_round_trips(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, one_doc_line())
    docs = load_corpus(path)
    assert len(docs) == 1
    sentence = docs[0].sentences[0]
    mention = sentence.variables[0]
    assert mention.surface == "C"
    assert sentence.definition_text(mention) == "concentration"


def test_definition_overlapping_variable_is_rejected(tmp_path):
    path = tmp_path / "c.jsonl"
    doc = one_doc_line()
    doc["sentences"][0]["variables"][0]["definition"] = {"start": 0, "end": 5}
    write_jsonl(path, doc)
    with pytest.raises(InvariantError, match="overlaps"):
        load_corpus(path)


def test_variable_span_out_of_bounds(tmp_path):
    path = tmp_path / "c.jsonl"
    doc = one_doc_line()
    doc["sentences"][0]["variables"][0]["end"] = 999
    write_jsonl(path, doc)
    with pytest.raises(InvariantError, match="v1"):
        load_corpus(path)


def test_overlapping_variable_spans_rejected():
    with pytest.raises(InvariantError, match="overlaps"):
        mk_sentence("alpha beta", ("v1", "alpha", None), ("v2", "lpha", None))


def test_duplicate_doc_id(tmp_path):
    path = tmp_path / "c.jsonl"
    write_jsonl(path, one_doc_line(), one_doc_line())
    with pytest.raises(DuplicateDocIdError, match="d1"):
        load_corpus(path)


def test_duplicate_var_id_within_doc():
    s1 = mk_sentence("T rises.", ("v1", "T", None))
    s2 = mk_sentence("q falls.", ("v1", "q", None))
    with pytest.raises(InvariantError, match="duplicate var_id"):
        mk_doc("d1", "CSTR", s1, s2)


def test_parse_error_carries_line_number(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(one_doc_line()) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(ParseError, match=":2"):
        load_corpus(path)


def test_unicode_offsets_round_trip(tmp_path):
    text = "µ_3 is the third moment."
    sentence = mk_sentence(text, ("v1", "µ_3", "third moment"))
    docs = [mk_doc("d1", "CRYST", sentence)]
    path = tmp_path / "c.jsonl"
    save_corpus(docs, path)
    reloaded = load_corpus(path)
    assert reloaded == docs
    m = reloaded[0].sentences[0].variables[0]
    assert reloaded[0].sentences[0].definition_text(m) == "third moment"


def test_save_load_round_trip_fixture(process_corpus, tmp_path):
    path = tmp_path / "copy.jsonl"
    save_corpus(process_corpus, path)
    assert load_corpus(path) == process_corpus
    # and the serialization itself is stable
    path2 = tmp_path / "copy2.jsonl"
    save_corpus(process_corpus, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_harvest_simple():
    doc = mk_doc(
        "d1", "CSTR", mk_sentence("C is the concentration", ("v1", "C", "concentration"))
    )
    pairs = harvest_pairs([doc])
    assert [(p.variable, p.definition) for p in pairs] == [("C", "concentration")]
    assert pairs[0].origin == ("d1", "v1")


def test_harvest_no_definitions():
    doc = mk_doc("d1", "CSTR", mk_sentence("T rises.", ("v1", "T", None)))
    assert harvest_pairs([doc]) == []


def test_fixture_counts_match_reference_table(process_corpus):
    stats = corpus_stats(process_corpus)
    assert (stats.num_docs, stats.num_variables, stats.num_with_definition) == (
        47,
        1214,
        820,
    )
    cryst = stats.per_process["CRYST"]
    assert (cryst.num_docs, cryst.num_variables, cryst.num_with_definition) == (
        11,
        281,
        200,
    )
    assert len(harvest_pairs(process_corpus)) == 820


def test_stats_empty_corpus():
    stats = corpus_stats([])
    assert (stats.num_docs, stats.num_variables, stats.num_with_definition) == (0, 0, 0)
    assert stats.per_process == {}


def test_harvest_length_equals_definition_count(process_corpus):
    # holds for the fixture and for random sub-corpora
    rng = random.Random(0)
    for _ in range(20):
        sub = rng.sample(process_corpus, rng.randint(0, len(process_corpus)))
        stats = corpus_stats(sub)
        assert len(harvest_pairs(sub)) == stats.num_with_definition
        assert stats.num_with_definition <= stats.num_variables


def test_harvested_definitions_are_gold_substrings(process_corpus):
    by_id = {doc.doc_id: doc for doc in process_corpus}
    for pair in harvest_pairs(process_corpus):
        doc = by_id[pair.origin[0]]
        for sentence, mention in doc.mentions():
            if mention.var_id == pair.origin[1]:
                assert sentence.definition_text(mention) == pair.definition
                assert mention.surface == pair.variable
                break
        else:
            pytest.fail(f"origin {pair.origin} not found")


def test_span_validation():
    with pytest.raises(InvariantError):
        Span(3, 3)
    with pytest.raises(InvariantError):
        Span(-1, 2)
    assert Span(0, 2).overlaps(Span(1, 5))
    assert not Span(0, 2).overlaps(Span(2, 5))
    assert Span(0, 9).contains(Span(3, 4))
