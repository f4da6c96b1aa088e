"""[target] substitution and tokenization with character-offset tracking.

The encoder input for one extraction target is the sentence with the
target variable replaced by the literal token "[target]", split into
word/punctuation tokens, prefixed with "[CLS]". Every non-special token
carries its [start, end) character interval in the ORIGINAL sentence;
the [target] token maps back to the original variable span and "[CLS]"
maps to nothing.

Sequences longer than max_len keep a window centered on the [target]
token (the target must survive truncation), with "[CLS]" always retained.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus_io import Mention, SentenceRec

TARGET = "[target]"
CLS = "[CLS]"

_TOKEN = re.compile(r"\[target\]|\w+|[^\w\s]")


@dataclass(frozen=True)
class Tokenization:
    tokens: tuple[str, ...]  # [CLS] first
    offsets: tuple[tuple[int, int] | None, ...]  # original-sentence coords
    truncated: bool
    target_index: int  # position of [target] within tokens


def tokenize_target(
    sentence: SentenceRec, mention: Mention, max_len: int
) -> Tokenization:
    if max_len < 2:
        raise ValueError(f"max_len must be >= 2, got {max_len}")
    text = sentence.text
    marked = text[: mention.start] + TARGET + text[mention.end :]
    shift = (mention.end - mention.start) - len(TARGET)

    tokens: list[str] = []
    offsets: list[tuple[int, int] | None] = []
    target_pos = None
    for m in _TOKEN.finditer(marked):
        tokens.append(m.group(0))
        if m.group(0) == TARGET and target_pos is None and m.start() == mention.start:
            target_pos = len(tokens) - 1
            offsets.append((mention.start, mention.end))
        elif m.start() >= mention.start + len(TARGET):
            offsets.append((m.start() + shift, m.end() + shift))
        else:
            offsets.append((m.start(), m.end()))

    if target_pos is None:
        raise ValueError(f"target token lost for var {mention.var_id!r}")

    truncated = False
    budget = max_len - 1  # room for [CLS]
    if len(tokens) > budget:
        truncated = True
        half = budget // 2
        lo = target_pos - half
        hi = lo + budget
        if lo < 0:
            lo, hi = 0, budget
        elif hi > len(tokens):
            hi = len(tokens)
            lo = hi - budget
        tokens = tokens[lo:hi]
        offsets = offsets[lo:hi]
        target_pos -= lo

    return Tokenization(
        tokens=(CLS, *tokens),
        offsets=(None, *offsets),
        truncated=truncated,
        target_index=target_pos + 1,
    )
