from pathlib import Path

import pytest

from vardef.corpus import (
    AnnotatedDocument,
    Sentence,
    Span,
    VariableMention,
    load_corpus,
)
from vardef.templates import TemplateSet, parse_template

FIXTURES = Path(__file__).parent / "fixtures"


def mk_sentence(text, *vars_):
    """Build a sentence from (var_id, surface, definition_or_None) triples.

    Surfaces and definitions are located by first occurrence, so test
    sentences must not repeat them.
    """
    mentions = []
    for var_id, surface, definition in vars_:
        start = text.index(surface)
        dspan = None
        if definition is not None:
            dstart = text.index(definition)
            dspan = Span(dstart, dstart + len(definition))
        mentions.append(
            VariableMention(
                var_id=var_id,
                span=Span(start, start + len(surface)),
                surface=surface,
                definition=dspan,
            )
        )
    return Sentence(text=text, variables=tuple(mentions))


def mk_doc(doc_id, process_tag, *sentences):
    return AnnotatedDocument(
        doc_id=doc_id, process_tag=process_tag, sentences=tuple(sentences)
    )


def mk_templates(*lines):
    return TemplateSet(templates=tuple(parse_template(line) for line in lines))


@pytest.fixture(scope="session")
def process_corpus():
    return load_corpus(FIXTURES / "process_corpus.jsonl")


@pytest.fixture(scope="session")
def symlink_corpus():
    return load_corpus(FIXTURES / "symlink_corpus.jsonl")
