"""Minimal reader for the corpus JSONL interchange format.

The bridge talks to the corpus toolkit only through files, so it carries
its own small reader: one document per line with sentences, character-span
variable mentions, and optional definition spans.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Mention:
    var_id: str
    start: int
    end: int
    definition: tuple[int, int] | None
    is_target: bool


@dataclass(frozen=True)
class SentenceRec:
    text: str
    mentions: tuple[Mention, ...]


@dataclass(frozen=True)
class DocumentRec:
    doc_id: str
    process_tag: str
    sentences: tuple[SentenceRec, ...]


def read_corpus(path: str | Path) -> list[DocumentRec]:
    path = Path(path)
    docs = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                sentences = []
                for raw_s in obj["sentences"]:
                    mentions = []
                    for raw_v in raw_s["variables"]:
                        raw_def = raw_v.get("definition")
                        mentions.append(
                            Mention(
                                var_id=raw_v["var_id"],
                                start=int(raw_v["start"]),
                                end=int(raw_v["end"]),
                                definition=(
                                    None
                                    if raw_def is None
                                    else (int(raw_def["start"]), int(raw_def["end"]))
                                ),
                                is_target=bool(raw_v.get("is_target", True)),
                            )
                        )
                    sentences.append(
                        SentenceRec(text=raw_s["text"], mentions=tuple(mentions))
                    )
                docs.append(
                    DocumentRec(
                        doc_id=obj["doc_id"],
                        process_tag=obj.get("process_tag", ""),
                        sentences=tuple(sentences),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
    return docs


def iter_targets(docs: list[DocumentRec]):
    """Yield (doc, sentence, mention) for every extraction target."""
    for doc in docs:
        for sentence in doc.sentences:
            for mention in sentence.mentions:
                if mention.is_target:
                    yield doc, sentence, mention
