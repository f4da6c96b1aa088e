import json

import pytest


def write_corpus(path, docs):
    with path.open("w", encoding="utf-8") as f:
        for doc in docs:
            f.write(json.dumps(doc) + "\n")
    return path


def doc_with_targets(doc_id, *sentences):
    """Each sentence: (text, [(var_id, surface, definition_or_None)])."""
    out_sentences = []
    for text, mentions in sentences:
        variables = []
        cursor = 0
        spans = {}
        for var_id, surface, _ in mentions:
            start = text.index(surface, cursor)
            spans[var_id] = (start, start + len(surface))
            cursor = start + len(surface)
        for var_id, surface, definition in mentions:
            dspan = None
            if definition is not None:
                dstart = text.index(definition, cursor)
                dspan = {"start": dstart, "end": dstart + len(definition)}
                cursor = dstart + len(definition)
            variables.append(
                {
                    "var_id": var_id,
                    "start": spans[var_id][0],
                    "end": spans[var_id][1],
                    "definition": dspan,
                    "is_target": True,
                }
            )
        out_sentences.append({"text": text, "variables": variables})
    return {"doc_id": doc_id, "process_tag": "TESTPROC", "sentences": out_sentences}


@pytest.fixture
def small_corpus(tmp_path):
    """Three extraction targets: two with gold definitions, one without."""
    docs = [
        doc_with_targets(
            "d1",
            ("k denotes the rate constant.", [("v1", "k", "rate constant")]),
            ("z appears once.", [("v2", "z", None)]),
        ),
        doc_with_targets(
            "d2",
            ("T stands for the coolant temperature.", [("v1", "T", "coolant temperature")]),
        ),
    ]
    return write_corpus(tmp_path / "corpus.jsonl", docs)
