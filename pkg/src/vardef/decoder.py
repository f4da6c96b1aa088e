"""Decode definition spans from per-token start/end score vectors.

Token positions are 1-based; position 1 is the [CLS] token. The decoded
span is the feasible pair (k, l) maximizing s_start[k] + s_end[l] over
{(k, l): 2 <= k <= l} plus the special point (1, 1), which signals that
no definition exists. Scores are compared by raw sum, no normalization.

Ties are broken deterministically: (1, 1) wins over any span on an exact
tie, then smaller k, then smaller l. decode() is O(d_input) via a running
prefix maximum; decode_bruteforce() enumerates every feasible pair and is
the oracle decode must match bit-for-bit.

The module also performs [target] substitution and token-to-character
span projection; tokenization itself lives behind the score-file boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Sentence, Span
from .errors import DataError, InvariantError, ParseError

TARGET_TOKEN = "[target]"


@dataclass(frozen=True)
class SpanScores:
    """Per-token start/end scores for one sentence, [CLS] first."""

    tokens: tuple[str, ...]
    s_start: tuple[float, ...]
    s_end: tuple[float, ...]

    def __post_init__(self) -> None:
        d = len(self.tokens)
        if d < 1:
            raise InvariantError("score vectors must have at least one position")
        if len(self.s_start) != d or len(self.s_end) != d:
            raise InvariantError(
                f"length mismatch: {d} tokens, {len(self.s_start)} start scores, "
                f"{len(self.s_end)} end scores"
            )
        for v in (*self.s_start, *self.s_end):
            if not math.isfinite(v):
                raise InvariantError(f"non-finite score {v!r}")


@dataclass(frozen=True)
class DecodedSpan:
    """Decoded token span, 1-based inclusive; (1, 1) means no definition."""

    start: int
    end: int
    score: float

    def __post_init__(self) -> None:
        ok = (self.start == 1 and self.end == 1) or 2 <= self.start <= self.end
        if not ok:
            raise InvariantError(f"infeasible decoded span ({self.start}, {self.end})")

    @property
    def is_no_definition(self) -> bool:
        return self.start == 1


def decode(scores: SpanScores) -> DecodedSpan:
    """Linear-time argmax over the feasible set, matching the brute force.

    The prefix maximum keeps its first (smallest) index and the incumbent
    is replaced only on a strictly larger sum, so ties resolve to (1, 1)
    first, then the smallest k, then the smallest l.
    """
    s_start, s_end = scores.s_start, scores.s_end
    d = len(s_start)
    best_k, best_l = 1, 1
    best = s_start[0] + s_end[0]
    top_start = -math.inf
    top_k = 0
    for l in range(2, d + 1):
        cand = s_start[l - 1]
        if cand > top_start:
            top_start, top_k = cand, l
        total = top_start + s_end[l - 1]
        if total > best:
            best, best_k, best_l = total, top_k, l
    return DecodedSpan(start=best_k, end=best_l, score=best)


def decode_bruteforce(scores: SpanScores) -> DecodedSpan:
    """Enumerate every feasible (k, l) pair; the decode oracle.

    All d^2 pair sums are materialized and the infeasible triangle masked
    out; the first maximum in row-major order realizes the smaller-k,
    then smaller-l tie-break, and (1, 1) is kept unless strictly beaten.
    """
    ss = np.asarray(scores.s_start, dtype=np.float64)
    se = np.asarray(scores.s_end, dtype=np.float64)
    d = ss.size
    best = DecodedSpan(start=1, end=1, score=float(ss[0] + se[0]))
    if d >= 2:
        sums = ss[1:, np.newaxis] + se[np.newaxis, 1:]
        feasible = np.triu(np.ones((d - 1, d - 1), dtype=bool))
        sums = np.where(feasible, sums, -np.inf)
        flat = int(np.argmax(sums))
        k, l = divmod(flat, d - 1)
        top = float(sums[k, l])
        if top > best.score:
            best = DecodedSpan(start=k + 2, end=l + 2, score=top)
    return best


@dataclass(frozen=True)
class TargetOffsetMap:
    """Character-offset correspondence created by one [target] substitution.

    Positions strictly before the substitution are unchanged; positions at
    or after its end shift by the length difference; positions inside the
    [target] token clamp to the original variable span (a token span that
    covers [target] projects back onto the original variable text).
    """

    original_span: Span  # variable span in the original sentence
    marked_span: Span  # [target] span in the marked sentence
    original_length: int
    marked_length: int

    @property
    def _shift(self) -> int:
        return self.original_span.end - self.marked_span.end

    def to_original(self, start: int, end: int) -> tuple[int, int]:
        """Project a [start, end) interval in the marked text back."""
        if not (0 <= start < end <= self.marked_length):
            raise DataError(
                f"interval [{start}, {end}) outside marked text "
                f"of length {self.marked_length}"
            )
        if start >= self.marked_span.end:
            o_start = start + self._shift
        elif start <= self.marked_span.start:
            o_start = start
        else:
            o_start = self.original_span.start
        if end <= self.marked_span.start:
            o_end = end
        elif end >= self.marked_span.end:
            o_end = end + self._shift
        else:
            o_end = self.original_span.end
        return o_start, o_end

    def to_marked(self, start: int, end: int) -> tuple[int, int]:
        """Project a [start, end) interval of the original text forward."""
        if not (0 <= start < end <= self.original_length):
            raise DataError(
                f"interval [{start}, {end}) outside sentence "
                f"of length {self.original_length}"
            )
        shift = self.marked_span.end - self.original_span.end
        if start >= self.original_span.end:
            m_start = start + shift
        elif start <= self.original_span.start:
            m_start = start
        else:
            m_start = self.marked_span.start
        if end <= self.original_span.start:
            m_end = end
        elif end >= self.original_span.end:
            m_end = end + shift
        else:
            m_end = self.marked_span.end
        return m_start, m_end


def mark_target(sentence: Sentence, var_id: str) -> tuple[str, TargetOffsetMap]:
    """Replace the target variable's span with the literal [target] token."""
    mention = next((v for v in sentence.variables if v.var_id == var_id), None)
    if mention is None:
        raise DataError(f"var_id {var_id!r} not present in sentence")
    span = mention.span
    marked = sentence.text[: span.start] + TARGET_TOKEN + sentence.text[span.end :]
    return marked, TargetOffsetMap(
        original_span=span,
        marked_span=Span(span.start, span.start + len(TARGET_TOKEN)),
        original_length=len(sentence.text),
        marked_length=len(marked),
    )


CharInterval = tuple[int, int]


def project_span(
    decoded: DecodedSpan, offset_map: list[CharInterval | None]
) -> Span | None:
    """Map a decoded token span to a character interval in the sentence.

    offset_map gives, per token position, the covered character interval
    in the original sentence, or None for special tokens like [CLS]. A
    NoDefinition decode projects to None, as does a span covering only
    special tokens.
    """
    if decoded.is_no_definition:
        return None
    if decoded.end > len(offset_map):
        raise DataError(
            f"stale offset map: decoded span ends at token {decoded.end}, "
            f"map has {len(offset_map)} entries"
        )
    covered = [iv for iv in offset_map[decoded.start - 1 : decoded.end] if iv is not None]
    if not covered:
        return None
    return Span(min(s for s, _ in covered), max(e for _, e in covered))


@dataclass(frozen=True)
class ScoreRecord:
    """One score-file record: scores plus token-to-character offsets."""

    doc_id: str
    var_id: str
    scores: SpanScores
    offset_map: tuple[CharInterval | None, ...]

    def __post_init__(self) -> None:
        if len(self.offset_map) != len(self.scores.tokens):
            raise InvariantError(
                f"offset map length {len(self.offset_map)} does not match "
                f"{len(self.scores.tokens)} tokens"
            )


def load_score_file(path: str | Path) -> list[ScoreRecord]:
    """Load score JSONL: one record per extraction target."""
    path = Path(path)
    records = []
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
                offset_map = tuple(
                    None if iv is None else (int(iv[0]), int(iv[1]))
                    for iv in obj["offset_map"]
                )
                record = ScoreRecord(
                    doc_id=str(obj["doc_id"]),
                    var_id=str(obj["var_id"]),
                    scores=SpanScores(
                        tokens=tuple(obj["tokens"]),
                        s_start=tuple(float(v) for v in obj["s_start"]),
                        s_end=tuple(float(v) for v in obj["s_end"]),
                    ),
                    offset_map=offset_map,
                )
            except InvariantError as exc:
                raise InvariantError(f"{where}: {exc}") from exc
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise ParseError(f"{where}: malformed score record: {exc}") from exc
            records.append(record)
    return records


def decode_predictions(records: list[ScoreRecord]) -> list[dict]:
    """Decode and project each record into the predictions JSONL shape."""
    out = []
    for rec in records:
        span = project_span(decode(rec.scores), list(rec.offset_map))
        out.append(
            {
                "doc_id": rec.doc_id,
                "var_id": rec.var_id,
                "predicted": (
                    None if span is None else {"start": span.start, "end": span.end}
                ),
            }
        )
    return out


def write_predictions(predictions: list[dict], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for row in predictions:
            f.write(json.dumps(row, ensure_ascii=False))
            f.write("\n")
