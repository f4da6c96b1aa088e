"""Data model and file IO for annotated documents and variable-definition pairs.

A corpus is a JSONL file, one document per line:

    {"doc_id": str, "process_tag": str, "sentences": [
        {"text": str, "variables": [
            {"var_id": str, "start": int, "end": int,
             "definition": {"start": int, "end": int} | null,
             "is_target": bool}]}]}

Offsets are Unicode code-point indices into the sentence text, half-open.
All loaded values are immutable; invariants are enforced at construction
time so a corpus object in hand is always valid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateDocIdError, InvariantError, ParseError


@dataclass(frozen=True)
class Span:
    """Half-open, non-empty character interval [start, end)."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end <= self.start:
            raise InvariantError(f"invalid span [{self.start}, {self.end})")

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class VariableMention:
    """One occurrence of a variable in a sentence.

    ``surface`` is always the substring of the sentence at ``span``; the
    loader derives it rather than trusting a stored copy.  ``is_target``
    is carried as given annotation (eligibility for extraction is a human
    judgment, not something the toolkit infers).
    """

    var_id: str
    span: Span
    surface: str
    definition: Span | None = None
    is_target: bool = True


@dataclass(frozen=True)
class Sentence:
    """Sentence text plus its variable mentions. Validates on construction."""

    text: str
    variables: tuple[VariableMention, ...] = ()

    def __post_init__(self) -> None:
        n = len(self.text)
        seen: list[tuple[str, Span]] = []
        for v in self.variables:
            if v.span.end > n:
                raise InvariantError(
                    f"variable {v.var_id!r}: span [{v.span.start}, {v.span.end}) "
                    f"outside sentence of length {n}"
                )
            if self.text[v.span.start : v.span.end] != v.surface:
                raise InvariantError(
                    f"variable {v.var_id!r}: surface {v.surface!r} does not match "
                    f"text at [{v.span.start}, {v.span.end})"
                )
            for other_id, other in seen:
                if v.span.overlaps(other):
                    raise InvariantError(
                        f"variable {v.var_id!r} overlaps variable {other_id!r}"
                    )
            if v.definition is not None:
                if v.definition.end > n:
                    raise InvariantError(
                        f"variable {v.var_id!r}: definition span outside sentence"
                    )
                if v.definition.overlaps(v.span):
                    raise InvariantError(
                        f"variable {v.var_id!r}: definition overlaps the variable span"
                    )
            seen.append((v.var_id, v.span))

    def definition_text(self, mention: VariableMention) -> str | None:
        if mention.definition is None:
            return None
        return self.text[mention.definition.start : mention.definition.end]


@dataclass(frozen=True)
class AnnotatedDocument:
    """One paper: an ordered sequence of annotated sentences.

    var_ids are unique within a document so that (doc_id, var_id) is a
    stable key for score files and predictions.
    """

    doc_id: str
    process_tag: str
    sentences: tuple[Sentence, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for s in self.sentences:
            for v in s.variables:
                if v.var_id in seen:
                    raise InvariantError(
                        f"doc {self.doc_id!r}: duplicate var_id {v.var_id!r}"
                    )
                seen.add(v.var_id)

    def mentions(self):
        """Yield (sentence, mention) pairs in document order."""
        for s in self.sentences:
            for v in s.variables:
                yield s, v


@dataclass(frozen=True)
class VarDefPair:
    """A (variable surface, definition text) pair harvested from a corpus."""

    variable: str
    definition: str
    origin: tuple[str, str] = ("", "")  # (doc_id, var_id)

    def __post_init__(self) -> None:
        if not self.variable:
            raise InvariantError("pair with empty variable surface")
        if not self.definition:
            raise InvariantError("pair with empty definition")


@dataclass(frozen=True)
class ProcessStats:
    num_docs: int
    num_variables: int
    num_with_definition: int


@dataclass(frozen=True)
class CorpusStats:
    num_docs: int
    num_variables: int
    num_with_definition: int
    per_process: dict[str, ProcessStats] = field(default_factory=dict)


def _span_from_json(obj, where: str) -> Span:
    try:
        return Span(int(obj["start"]), int(obj["end"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: malformed span object: {exc}") from exc


def _document_from_json(obj: dict, where: str) -> AnnotatedDocument:
    try:
        doc_id = obj["doc_id"]
        process_tag = obj["process_tag"]
        raw_sentences = obj["sentences"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{where}: missing document field: {exc}") from exc
    if not isinstance(doc_id, str) or not isinstance(process_tag, str):
        raise ParseError(f"{where}: doc_id and process_tag must be strings")

    sentences = []
    for si, raw in enumerate(raw_sentences):
        try:
            text = raw["text"]
            raw_vars = raw["variables"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{where}: sentence {si}: missing field: {exc}") from exc
        mentions = []
        for raw_v in raw_vars:
            var_id = raw_v.get("var_id", "?") if isinstance(raw_v, dict) else "?"
            try:
                var_id = raw_v["var_id"]
                span = Span(int(raw_v["start"]), int(raw_v["end"]))
                raw_def = raw_v.get("definition")
                is_target = bool(raw_v.get("is_target", True))
            except InvariantError as exc:
                raise InvariantError(f"variable {var_id!r}: {exc}") from exc
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(
                    f"{where}: sentence {si}: malformed variable: {exc}"
                ) from exc
            definition = None
            if raw_def is not None:
                try:
                    definition = _span_from_json(raw_def, f"{where}: sentence {si}")
                except InvariantError as exc:
                    raise InvariantError(f"variable {var_id!r}: {exc}") from exc
            mentions.append(
                VariableMention(
                    var_id=var_id,
                    span=span,
                    surface=text[span.start : span.end],
                    definition=definition,
                    is_target=is_target,
                )
            )
        sentences.append(Sentence(text=text, variables=tuple(mentions)))
    return AnnotatedDocument(
        doc_id=doc_id, process_tag=process_tag, sentences=tuple(sentences)
    )


def load_corpus(path: str | Path) -> list[AnnotatedDocument]:
    """Load and validate a corpus JSONL file.

    Raises ParseError on malformed JSON or schema violations (with line
    number), InvariantError on annotation-invariant violations, and
    DuplicateDocIdError on repeated doc_ids.
    """
    path = Path(path)
    docs: list[AnnotatedDocument] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: invalid JSON: {exc.msg}") from exc
            try:
                doc = _document_from_json(obj, where)
            except InvariantError as exc:
                doc_id = obj.get("doc_id", "?") if isinstance(obj, dict) else "?"
                raise InvariantError(f"{where}: doc {doc_id!r}: {exc}") from exc
            if doc.doc_id in seen_ids:
                raise DuplicateDocIdError(f"{where}: duplicate doc_id {doc.doc_id!r}")
            seen_ids.add(doc.doc_id)
            docs.append(doc)
    return docs


def document_to_json(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "process_tag": doc.process_tag,
        "sentences": [
            {
                "text": s.text,
                "variables": [
                    {
                        "var_id": v.var_id,
                        "start": v.span.start,
                        "end": v.span.end,
                        "definition": (
                            None
                            if v.definition is None
                            else {"start": v.definition.start, "end": v.definition.end}
                        ),
                        "is_target": v.is_target,
                    }
                    for v in s.variables
                ],
            }
            for s in doc.sentences
        ],
    }


def save_corpus(docs: list[AnnotatedDocument], path: str | Path) -> None:
    """Write a corpus as JSONL (UTF-8, LF, one document per line)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for doc in docs:
            f.write(json.dumps(document_to_json(doc), ensure_ascii=False))
            f.write("\n")


def harvest_pairs(docs: list[AnnotatedDocument]) -> list[VarDefPair]:
    """Collect one pair per variable mention that has a definition.

    Order is deterministic: document order, then sentence order, then
    mention order.
    """
    pairs = []
    for doc in docs:
        for sentence, mention in doc.mentions():
            if mention.definition is None:
                continue
            pairs.append(
                VarDefPair(
                    variable=mention.surface,
                    definition=sentence.definition_text(mention),
                    origin=(doc.doc_id, mention.var_id),
                )
            )
    return pairs


def corpus_stats(docs: list[AnnotatedDocument]) -> CorpusStats:
    """Count documents, variable mentions, and definitions, per process tag."""
    per: dict[str, list[int]] = {}
    total_vars = 0
    total_defs = 0
    for doc in docs:
        row = per.setdefault(doc.process_tag, [0, 0, 0])
        row[0] += 1
        for _, mention in doc.mentions():
            row[1] += 1
            total_vars += 1
            if mention.definition is not None:
                row[2] += 1
                total_defs += 1
    return CorpusStats(
        num_docs=len(docs),
        num_variables=total_vars,
        num_with_definition=total_defs,
        per_process={tag: ProcessStats(*row) for tag, row in per.items()},
    )
