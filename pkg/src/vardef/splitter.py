"""Dataset splitting protocols and leave-one-process-out construction.

Two protocols are provided. The process protocol works at paper
granularity: per process tag, a seeded uniform draw of test papers
(3 by default, 2 for STHE), then one validation paper, remainder train.
The ratio protocol partitions items train:validation (3:1 by default),
with the train size floored on non-multiples.

Manifests record the assignment of every doc_id and are reproducible:
the same seed yields a byte-identical manifest, and repeated experiments
derive their seeds as base_seed + experiment_id.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import AnnotatedDocument
from .errors import DataError, ParseError

TRAIN = "train"
VALIDATION = "validation"
TEST = "test"

DEFAULT_TEST_COUNT = 3
# The source protocol assigns only two test papers to the smallest process.
SPECIAL_TEST_COUNTS = {"STHE": 2}


@dataclass(frozen=True)
class SplitManifest:
    experiment_id: int
    seed: int
    protocol: str
    assignments: dict[str, str]  # doc_id -> train | validation | test

    def doc_ids(self, role: str) -> list[str]:
        return [d for d, r in self.assignments.items() if r == role]


def _group_by_process(docs: list[AnnotatedDocument]) -> dict[str, list[str]]:
    """Group doc_ids by process tag, in first-appearance order."""
    groups: dict[str, list[str]] = {}
    for doc in docs:
        groups.setdefault(doc.process_tag, []).append(doc.doc_id)
    return groups


def split_process_corpus(
    docs: list[AnnotatedDocument],
    seed: int,
    test_counts: dict[str, int] | None = None,
    val_count: int = 1,
    experiment_id: int = 1,
) -> SplitManifest:
    """Per-process split: seeded test papers, one validation paper, rest train."""
    if not docs:
        raise DataError("cannot split an empty corpus")
    rng = random.Random(seed)
    assignments: dict[str, str] = {doc.doc_id: TRAIN for doc in docs}
    for tag, ids in _group_by_process(docs).items():
        if test_counts is not None and tag in test_counts:
            test_n = test_counts[tag]
        else:
            test_n = SPECIAL_TEST_COUNTS.get(tag, DEFAULT_TEST_COUNT)
        if len(ids) < test_n + val_count + 1:
            raise DataError(
                f"process {tag!r} has {len(ids)} papers, needs at least "
                f"{test_n + val_count + 1} for a {test_n}/{val_count}/rest split"
            )
        test_ids = rng.sample(ids, test_n)
        rest = [d for d in ids if d not in test_ids]
        val_ids = rng.sample(rest, val_count)
        for d in test_ids:
            assignments[d] = TEST
        for d in val_ids:
            assignments[d] = VALIDATION
    return SplitManifest(
        experiment_id=experiment_id,
        seed=seed,
        protocol="process",
        assignments=assignments,
    )


def split_ratio(
    docs: list[AnnotatedDocument],
    seed: int,
    ratio: tuple[int, int] = (3, 1),
    experiment_id: int = 1,
) -> SplitManifest:
    """Seeded train:validation partition; train size is floored."""
    if not docs:
        raise DataError("cannot split an empty corpus")
    train_part, val_part = ratio
    if train_part <= 0 or val_part <= 0:
        raise DataError(f"invalid ratio {train_part}:{val_part}")
    ids = [doc.doc_id for doc in docs]
    train_n = (len(ids) * train_part) // (train_part + val_part)
    rng = random.Random(seed)
    train_ids = set(rng.sample(ids, train_n))
    assignments = {d: (TRAIN if d in train_ids else VALIDATION) for d in ids}
    return SplitManifest(
        experiment_id=experiment_id,
        seed=seed,
        protocol=f"ratio-{train_part}:{val_part}",
        assignments=assignments,
    )


def explode_sentences(docs: list[AnnotatedDocument]) -> list[AnnotatedDocument]:
    """Rewrite a corpus as one single-sentence document per sentence.

    Supports sentence-granularity splitting; derived doc_ids are
    "<doc_id>#s<index>".
    """
    out = []
    for doc in docs:
        for i, sentence in enumerate(doc.sentences):
            out.append(
                AnnotatedDocument(
                    doc_id=f"{doc.doc_id}#s{i}",
                    process_tag=doc.process_tag,
                    sentences=(sentence,),
                )
            )
    return out


def leave_one_process_out(
    docs: list[AnnotatedDocument], excluded: str
) -> tuple[list[AnnotatedDocument], list[AnnotatedDocument]]:
    """Partition a corpus into (everything else, the excluded process)."""
    tags = {doc.process_tag for doc in docs}
    if excluded not in tags:
        raise DataError(f"unknown process tag {excluded!r}; corpus has {sorted(tags)}")
    rest = [d for d in docs if d.process_tag != excluded]
    held_out = [d for d in docs if d.process_tag == excluded]
    return rest, held_out


def apply_manifest(
    docs: list[AnnotatedDocument], manifest: SplitManifest
) -> dict[str, list[AnnotatedDocument]]:
    """Materialize a manifest into role -> documents (document order kept)."""
    roles: dict[str, list[AnnotatedDocument]] = {TRAIN: [], VALIDATION: [], TEST: []}
    missing = [d.doc_id for d in docs if d.doc_id not in manifest.assignments]
    if missing:
        raise DataError(f"manifest does not cover doc_ids {missing[:5]}")
    for doc in docs:
        roles[manifest.assignments[doc.doc_id]].append(doc)
    return roles


def manifest_to_json(manifest: SplitManifest) -> dict:
    return {
        "experiment_id": manifest.experiment_id,
        "seed": manifest.seed,
        "protocol": manifest.protocol,
        "assignments": dict(sorted(manifest.assignments.items())),
    }


def save_manifest(manifest: SplitManifest, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest_to_json(manifest), f, ensure_ascii=False, indent=2)
        f.write("\n")


def load_manifest(path: str | Path) -> SplitManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
        return SplitManifest(
            experiment_id=int(obj["experiment_id"]),
            seed=int(obj["seed"]),
            protocol=str(obj["protocol"]),
            assignments={str(k): str(v) for k, v in obj["assignments"].items()},
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed manifest: {exc}") from exc
