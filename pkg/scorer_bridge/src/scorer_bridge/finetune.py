"""Staged fine-tuning of the toy span scorer, and checkpoint inference.

finetune_stub runs the three-stage curriculum: each stage directory holds
a train.jsonl (and optionally validation.jsonl) corpus, and the stages are
visited strictly in the order given. Training examples are extraction
targets; the supervision signal is the token index pair of the gold
definition span, or (0, 0) pointing at [CLS] when no definition exists.

This is a smoke-scale loop for exercising the curriculum and the file
contracts, not a recipe for the full-scale model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .corpus_io import iter_targets, read_corpus
from .model import SpanScorerModel, batch_ids
from .scoring import _gold_token_range
from .tokenizer import tokenize_target

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    max_len: int = 128
    batch_size: int = 8
    learning_rate: float = 1e-5
    epochs: int = 1
    seed: int = 0
    device: str = "cpu"


@dataclass(frozen=True)
class Example:
    tokens: list[str]
    start: int
    end: int


def build_examples(corpus_path: Path, max_len: int) -> list[Example]:
    examples = []
    for doc, sentence, mention in iter_targets(read_corpus(corpus_path)):
        tok = tokenize_target(sentence, mention, max_len)
        start = end = 0  # [CLS]: no definition
        if mention.definition is not None:
            cover = _gold_token_range(tok, mention.definition)
            if cover is None:
                log.warning(
                    "gold span outside window for (%s, %s); trained as no-definition",
                    doc.doc_id,
                    mention.var_id,
                )
            else:
                start, end = cover
        examples.append(Example(tokens=list(tok.tokens), start=start, end=end))
    return examples


def _run_epoch(model, optimizer, examples, batch_size, device) -> float:
    loss_fn = nn.CrossEntropyLoss()
    total = 0.0
    batches = 0
    for i in range(0, len(examples), batch_size):
        batch = examples[i : i + batch_size]
        ids, mask = batch_ids(model, [ex.tokens for ex in batch])
        ids, mask = ids.to(device), mask.to(device)
        start_logits, end_logits = model(ids, mask)
        start_t = torch.tensor([ex.start for ex in batch], device=device)
        end_t = torch.tensor([ex.end for ex in batch], device=device)
        loss = loss_fn(start_logits, start_t) + loss_fn(end_logits, end_t)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        total += float(loss.item())
        batches += 1
    return total / max(batches, 1)


def finetune_stub(
    stage_dirs: list[str | Path],
    out_path: str | Path,
    config: TrainConfig = TrainConfig(),
    resume: str | Path | None = None,
) -> Path:
    """Train through the stage directories in order; returns the checkpoint.

    With resume, stages already recorded in the checkpoint are skipped so
    an interrupted curriculum continues in the same order.
    """
    out_path = Path(out_path)
    torch.manual_seed(config.seed)
    model = SpanScorerModel(max_len=max(config.max_len, 16))
    completed: list[str] = []
    if resume is not None:
        state = torch.load(Path(resume), map_location="cpu", weights_only=True)
        model.load_state_dict(state["model"])
        completed = list(state.get("stages_completed", []))
        log.info("resumed from %s with stages %s complete", resume, completed)
    device = torch.device(config.device)
    model.to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)

    n_stages = len(stage_dirs)
    for number, stage_dir in enumerate(stage_dirs, start=1):
        stage_dir = Path(stage_dir)
        name = stage_dir.name
        if name in completed:
            log.info("stage %d/%d [%s]: already complete, skipping", number, n_stages, name)
            continue
        examples = build_examples(stage_dir / "train.jsonl", config.max_len)
        log.info("stage %d/%d [%s]: %d examples", number, n_stages, name, len(examples))
        model.train()
        for epoch in range(1, config.epochs + 1):
            mean_loss = _run_epoch(
                model, optimizer, examples, config.batch_size, device
            )
            log.info(
                "stage %d/%d [%s] epoch %d: loss %.4f",
                number,
                n_stages,
                name,
                epoch,
                mean_loss,
            )
        completed.append(name)

    torch.save(
        {
            "model": model.state_dict(),
            "stages_completed": completed,
            "max_len": config.max_len,
        },
        out_path,
    )
    log.info("checkpoint written to %s", out_path)
    return out_path


def load_checkpoint_scorer(path: str | Path, device: str = "cpu"):
    """Build a tokens -> (s_start, s_end) callable from a checkpoint."""
    state = torch.load(Path(path), map_location="cpu", weights_only=True)
    model = SpanScorerModel(max_len=max(int(state.get("max_len", 128)), 16))
    model.load_state_dict(state["model"])
    model.to(torch.device(device))
    model.eval()

    def scorer(tokens: list[str]) -> tuple[list[float], list[float]]:
        with torch.no_grad():
            ids, mask = batch_ids(model, [list(tokens)])
            start_logits, end_logits = model(ids, mask)
            s_start = torch.softmax(start_logits[0], dim=-1)
            s_end = torch.softmax(end_logits[0], dim=-1)
        return (
            [round(float(v), 8) for v in s_start],
            [round(float(v), 8) for v in s_end],
        )

    return scorer
