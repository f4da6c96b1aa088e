"""Generate definition sentences by filling template sentences with
harvested variable-definition pairs.

The generation procedure cycles through the template set starting at the
first template. Each step takes the current template, consumes as many
pairs as it has variable slots, substitutes them, and emits one annotated
sentence; the cycle position then advances by one (wrapping at the end).
Generation stops when the pair list is empty, so the output contains
exactly one target variable per input pair regardless of the set size.

Unspecified details are pinned down as follows:
  - pairs are shuffled once with the given seed and then consumed from the
    front, giving without-replacement semantics and reproducibility;
  - when fewer pairs remain than the current template needs, the cycle
    advances forward to the next template that fits (an arity-1 template
    always exists, so this terminates) without resetting the cycle;
  - substituted definition strings are kept verbatim, no casing or article
    repair.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import AnnotatedDocument, Sentence, Span, VarDefPair, VariableMention
from .templates import Template, TemplateSet


@dataclass(frozen=True)
class AugmentationRun:
    """Record of one generation run: inputs, consumption plan, and output."""

    pairs: tuple[VarDefPair, ...]
    templates: TemplateSet
    seed: int
    plan: tuple[tuple[int, int], ...]  # (template index j, pairs consumed)
    output: list[AnnotatedDocument] = field(default_factory=list)


def _consumption_schedule(pairs_count: int, templates: TemplateSet):
    """Yield (1-based template index, template) in consumption order."""
    remaining = pairs_count
    j = 0  # 0-based cursor of the next template to try
    size = templates.size
    while remaining > 0:
        while templates.templates[j].var_slots > remaining:
            j = (j + 1) % size
        t = templates.templates[j]
        yield j + 1, t
        remaining -= t.var_slots
        j = (j + 1) % size


def plan_preview(pairs_count: int, templates: TemplateSet) -> list[tuple[int, int]]:
    """Dry-run the consumption schedule: (template index j, pairs consumed)."""
    return [(j, t.var_slots) for j, t in _consumption_schedule(pairs_count, templates)]


def _fill(template: Template, selected: list[VarDefPair]) -> Sentence:
    """Substitute pairs into a template and annotate the result.

    selected[i-1] feeds [VAR_i] and, when present, [DEF_i]. Variables
    whose index has no DEF slot get no gold definition.
    """
    parts: list[str] = []
    pos = 0
    cursor = 0
    var_spans: dict[int, Span] = {}
    def_spans: dict[int, Span] = {}
    for slot in template.slot_positions:
        parts.append(template.raw[cursor : slot.start])
        pos += slot.start - cursor
        pair = selected[slot.index - 1]
        replacement = pair.variable if slot.kind == "VAR" else pair.definition
        spans = var_spans if slot.kind == "VAR" else def_spans
        spans[slot.index] = Span(pos, pos + len(replacement))
        parts.append(replacement)
        pos += len(replacement)
        cursor = slot.end
    parts.append(template.raw[cursor:])
    text = "".join(parts)

    mentions = []
    for i, pair in enumerate(selected, start=1):
        mentions.append(
            VariableMention(
                var_id=f"v{i}",
                span=var_spans[i],
                surface=pair.variable,
                definition=def_spans.get(i),
                is_target=True,
            )
        )
    return Sentence(text=text, variables=tuple(mentions))


def run_augmentation(
    pairs: list[VarDefPair], templates: TemplateSet, seed: int
) -> AugmentationRun:
    """Execute a full generation run and return it with its plan.

    Each generated sentence becomes its own single-sentence document with
    doc_id "tpl-<seed>-<sequence>" and process tag "TPL" so generated data
    stays traceable through splits.
    """
    working = list(pairs)
    random.Random(seed).shuffle(working)

    plan: list[tuple[int, int]] = []
    output: list[AnnotatedDocument] = []
    front = 0
    for seq, (j, template) in enumerate(
        _consumption_schedule(len(working), templates), start=1
    ):
        n = template.var_slots
        selected = working[front : front + n]
        front += n
        plan.append((j, n))
        output.append(
            AnnotatedDocument(
                doc_id=f"tpl-{seed}-{seq}",
                process_tag="TPL",
                sentences=(_fill(template, selected),),
            )
        )
    return AugmentationRun(
        pairs=tuple(pairs),
        templates=templates,
        seed=seed,
        plan=tuple(plan),
        output=output,
    )


def augment(
    pairs: list[VarDefPair], templates: TemplateSet, seed: int
) -> list[AnnotatedDocument]:
    """Generate the augmented corpus; see run_augmentation for the record."""
    return run_augmentation(pairs, templates, seed).output
