"""Score-file production: deterministic mocks and encoder inference.

Output format (one JSON line per extraction target, the decoder's input):

    {"doc_id": str, "var_id": str, "tokens": [str], "s_start": [float],
     "s_end": [float], "offset_map": [[int, int] | null]}

Models:
    mock       pseudo-random scores hashed from (doc_id, var_id, token
               index); replayable byte for byte.
    mock-gold  like mock, but the gold span's first/last tokens (or [CLS]
               when the variable has no definition) receive winning scores;
               useful for wiring tests that must see true positives.
    <path>     a checkpoint produced by finetune_stub; runs the toy
               encoder and emits per-vector softmax probabilities.

The output file is written atomically (temp file, then rename).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from .corpus_io import iter_targets, read_corpus
from .tokenizer import Tokenization, tokenize_target

log = logging.getLogger(__name__)

MOCK_MODELS = ("mock", "mock-gold")


@dataclass(frozen=True)
class ScorerConfig:
    model: str = "mock"
    max_len: int = 256
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.max_len < 2:
            raise ValueError(f"max_len must be >= 2, got {self.max_len}")


def _hash_unit(*parts: object) -> float:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big") / 2**32


def _mock_vector(doc_id: str, var_id: str, kind: str, n: int) -> list[float]:
    # bounded noise, clearly below the boost levels used by mock-gold
    return [round(0.05 + 0.8 * _hash_unit(doc_id, var_id, kind, i), 6) for i in range(n)]


def _gold_token_range(tok: Tokenization, gold: tuple[int, int]):
    """First/last token positions lying inside the gold char span, if any."""
    inside = [
        i
        for i, iv in enumerate(tok.offsets)
        if iv is not None and iv[0] >= gold[0] and iv[1] <= gold[1]
    ]
    if not inside:
        return None
    return inside[0], inside[-1]


def mock_scores(
    doc_id: str,
    var_id: str,
    tok: Tokenization,
    gold: tuple[int, int] | None,
    favor_gold: bool,
) -> tuple[list[float], list[float]]:
    n = len(tok.tokens)
    s_start = _mock_vector(doc_id, var_id, "start", n)
    s_end = _mock_vector(doc_id, var_id, "end", n)
    if favor_gold:
        if gold is None:
            s_start[0] = s_end[0] = 0.99
        else:
            cover = _gold_token_range(tok, gold)
            if cover is None:
                # gold fell out of the truncation window; signal no-definition
                log.warning("gold span outside window for (%s, %s)", doc_id, var_id)
                s_start[0] = s_end[0] = 0.99
            else:
                s_start[cover[0]] = 0.97
                s_end[cover[1]] = 0.97
    return s_start, s_end


def score_corpus(
    corpus_path: str | Path, config: ScorerConfig, out_path: str | Path
) -> Path:
    """Write one score record per extraction target; returns the path."""
    corpus_path = Path(corpus_path)
    out_path = Path(out_path)
    docs = read_corpus(corpus_path)

    encoder = None
    if config.model not in MOCK_MODELS:
        from .finetune import load_checkpoint_scorer

        encoder = load_checkpoint_scorer(config.model, device=config.device)

    n_records = 0
    n_truncated = 0
    tmp_path = out_path.with_name(out_path.name + ".tmp")
    with tmp_path.open("w", encoding="utf-8", newline="\n") as f:
        for doc, sentence, mention in iter_targets(docs):
            tok = tokenize_target(sentence, mention, config.max_len)
            if tok.truncated:
                n_truncated += 1
                log.info(
                    "truncated (%s, %s) to %d tokens centered on the target",
                    doc.doc_id,
                    mention.var_id,
                    len(tok.tokens),
                )
            if encoder is not None:
                s_start, s_end = encoder(tok.tokens)
            else:
                s_start, s_end = mock_scores(
                    doc.doc_id,
                    mention.var_id,
                    tok,
                    mention.definition,
                    favor_gold=config.model == "mock-gold",
                )
            record = {
                "doc_id": doc.doc_id,
                "var_id": mention.var_id,
                "tokens": list(tok.tokens),
                "s_start": s_start,
                "s_end": s_end,
                "offset_map": [
                    None if iv is None else [iv[0], iv[1]] for iv in tok.offsets
                ],
            }
            f.write(json.dumps(record, ensure_ascii=False))
            f.write("\n")
            n_records += 1
    os.replace(tmp_path, out_path)
    log.info(
        "scored %d targets (%d truncated) with model %s -> %s",
        n_records,
        n_truncated,
        config.model,
        out_path,
    )
    return out_path
