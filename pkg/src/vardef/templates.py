"""Template sentence sets with controlled definition-token distributions.

A template is a sentence skeleton whose placeholders are literal bracket
tokens: [VAR_1]..[VAR_n] (each exactly once, indices contiguous from 1,
n between 1 and 6) and optionally [DEF_i] for a subset of the VAR indices.
Template files are UTF-8 text, one template per line; blank lines and
``#``-prefixed comment lines are ignored.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataError, ParseError

MAX_ARITY = 6

_PLACEHOLDER = re.compile(r"\[(VAR|DEF)_([0-9]+)\]")
# Anything bracketed that starts like a placeholder but does not parse as one.
_SUSPECT = re.compile(r"\[(?:VAR|DEF)[^\]]*\]")


@dataclass(frozen=True)
class Slot:
    """One placeholder occurrence: kind is 'VAR' or 'DEF', index is 1-based,
    start/end delimit the raw placeholder text within the template string."""

    kind: str
    index: int
    start: int
    end: int


@dataclass(frozen=True)
class Template:
    raw: str
    var_slots: int
    def_indices: frozenset[int]
    slot_positions: tuple[Slot, ...]

    @property
    def def_slots(self) -> int:
        return len(self.def_indices)


@dataclass(frozen=True)
class TemplateSet:
    """Ordered set of templates; index j runs 1..J in file order.

    Always contains at least one arity-1 template: the augmentor's
    leftover rule needs a template that fits a single remaining pair.
    """

    templates: tuple[Template, ...]

    def __post_init__(self) -> None:
        if not self.templates:
            raise DataError("template set is empty")
        if not any(t.var_slots == 1 for t in self.templates):
            raise DataError("template set has no arity-1 template")

    @property
    def size(self) -> int:
        return len(self.templates)


def parse_template(raw: str, where: str = "template") -> Template:
    """Parse and validate one template line."""
    matches = list(_PLACEHOLDER.finditer(raw))
    valid_spans = {(m.start(), m.end()) for m in matches}
    for m in _SUSPECT.finditer(raw):
        if (m.start(), m.end()) not in valid_spans:
            raise ParseError(f"{where}: malformed placeholder {m.group(0)!r}")

    slots = []
    var_indices: list[int] = []
    def_indices: list[int] = []
    for m in matches:
        kind, idx = m.group(1), int(m.group(2))
        slots.append(Slot(kind=kind, index=idx, start=m.start(), end=m.end()))
        if kind == "VAR":
            if idx in var_indices:
                raise ParseError(f"{where}: [VAR_{idx}] appears more than once")
            var_indices.append(idx)
        else:
            if idx in def_indices:
                raise ParseError(f"{where}: [DEF_{idx}] appears more than once")
            def_indices.append(idx)

    if not var_indices:
        raise ParseError(f"{where}: no [VAR_i] placeholder")
    n = len(var_indices)
    if n > MAX_ARITY:
        raise ParseError(f"{where}: {n} variable tokens exceeds the maximum of 6")
    if sorted(var_indices) != list(range(1, n + 1)):
        raise ParseError(
            f"{where}: VAR indices must be contiguous from 1, got {sorted(var_indices)}"
        )
    for idx in def_indices:
        if idx not in var_indices:
            raise ParseError(f"{where}: [DEF_{idx}] has no matching [VAR_{idx}]")

    return Template(
        raw=raw,
        var_slots=n,
        def_indices=frozenset(def_indices),
        slot_positions=tuple(slots),
    )


def load_templates(path: str | Path) -> TemplateSet:
    """Load a template file, preserving line order as the j-order."""
    path = Path(path)
    templates = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            stripped = line.rstrip("\n")
            if not stripped.strip() or stripped.lstrip().startswith("#"):
                continue
            templates.append(parse_template(stripped, where=f"{path}:{lineno}"))
    return TemplateSet(templates=tuple(templates))


def def_token_histogram(tset: TemplateSet) -> list[int]:
    """Count templates by number of definition tokens; buckets 0..6."""
    hist = [0] * (MAX_ARITY + 1)
    for t in tset.templates:
        hist[t.def_slots] += 1
    return hist


def subset_templates(
    tset: TemplateSet,
    target_size: int,
    target_histogram: Sequence[int],
    seed: int,
) -> TemplateSet:
    """Draw a seeded random subset with an exact definition-token histogram.

    The draw is uniform over subsets that match the histogram and satisfy
    the TemplateSet invariant (at least one arity-1 template), implemented
    by per-bucket sampling with rejection. Source order is preserved among
    the chosen templates, so repeated subsetting uses only templates present
    in the original set.
    """
    if len(target_histogram) != MAX_ARITY + 1:
        raise DataError(
            f"target histogram must have {MAX_ARITY + 1} buckets, "
            f"got {len(target_histogram)}"
        )
    if sum(target_histogram) != target_size:
        raise DataError(
            f"target histogram sums to {sum(target_histogram)}, "
            f"expected target size {target_size}"
        )
    buckets: dict[int, list[int]] = {d: [] for d in range(MAX_ARITY + 1)}
    for i, t in enumerate(tset.templates):
        buckets[t.def_slots].append(i)
    for d, want in enumerate(target_histogram):
        if want < 0:
            raise DataError(f"negative count for bucket {d}")
        if want > len(buckets[d]):
            raise DataError(
                f"infeasible histogram: bucket {d} wants {want} templates, "
                f"source has {len(buckets[d])}"
            )
    # The subset must contain an arity-1 template; check some bucket with a
    # nonzero quota can supply one, otherwise no draw can ever satisfy it.
    if not any(
        target_histogram[d] > 0
        and any(tset.templates[i].var_slots == 1 for i in buckets[d])
        for d in range(MAX_ARITY + 1)
    ):
        raise DataError(
            "infeasible histogram: no sampled bucket can contribute an "
            "arity-1 template"
        )

    rng = random.Random(seed)
    while True:
        chosen: list[int] = []
        for d, want in enumerate(target_histogram):
            if want:
                chosen.extend(rng.sample(buckets[d], want))
        if any(tset.templates[i].var_slots == 1 for i in chosen):
            chosen.sort()
            return TemplateSet(templates=tuple(tset.templates[i] for i in chosen))
