"""Vocabulary overlap between datasets' definition texts.

The similarity between two corpora is the overlap coefficient of the word
sets composing their gold definitions: |W_A & W_B| / min(|W_A|, |W_B|).
Words are lowercased, stripped of surrounding punctuation, split on
whitespace, and filtered against a stop-word list. Both the tokenizer
and the shipped default stop words are toolkit conventions; reported
percentages depend on them.
"""

from __future__ import annotations

import string
from importlib import resources
from pathlib import Path

from .corpus import AnnotatedDocument
from .errors import DataError

DEFAULT_STOPWORDS = frozenset(
    {"of", "and", "the", "a", "an", "in", "for", "to", "at", "on", "by", "with"}
)

DefinitionVocabulary = set[str]


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load one stop word per line; None loads the packaged default list."""
    if path is None:
        text = (
            resources.files("vardef").joinpath("data/stopwords.txt").read_text("utf-8")
        )
    else:
        text = Path(path).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        word = line.strip().lower()
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


def tokenize_definition(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip surrounding punctuation."""
    tokens = []
    for raw in text.lower().split():
        token = raw.strip(string.punctuation)
        if token:
            tokens.append(token)
    return tokens


def build_vocabulary(
    docs: list[AnnotatedDocument],
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
) -> DefinitionVocabulary:
    """Union the non-stop-words of every gold definition in the corpus."""
    vocab: set[str] = set()
    for doc in docs:
        for sentence, mention in doc.mentions():
            definition = sentence.definition_text(mention)
            if definition is None:
                continue
            for token in tokenize_definition(definition):
                if token not in stopwords:
                    vocab.add(token)
    return vocab


def simpson(a: DefinitionVocabulary, b: DefinitionVocabulary) -> float | None:
    """Overlap coefficient; None (undefined) when either set is empty."""
    if not a or not b:
        return None
    return len(a & b) / min(len(a), len(b))


def similarity_matrix(
    corpora: dict[str, list[AnnotatedDocument]],
    stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS,
) -> dict[str, dict[str, float | None]]:
    """All pairwise similarities; symmetric, diagonal 1.0 for non-empty sets."""
    if len(corpora) < 2:
        raise DataError("similarity matrix needs at least two corpora")
    vocabs = {name: build_vocabulary(docs, stopwords) for name, docs in corpora.items()}
    names = list(corpora)
    matrix: dict[str, dict[str, float | None]] = {n: {} for n in names}
    for i, a in enumerate(names):
        for b in names[i:]:
            value = simpson(vocabs[a], vocabs[b])
            matrix[a][b] = value
            matrix[b][a] = value
    return matrix


def matrix_to_percent(
    matrix: dict[str, dict[str, float | None]],
) -> dict[str, dict[str, float | None]]:
    """Fig.-style display values: percentages rounded to one decimal."""
    return {
        a: {b: (None if v is None else round(100.0 * v, 1)) for b, v in row.items()}
        for a, row in matrix.items()
    }
