"""End-to-end experiment runs: repeated splits, staged corpora, reports.

One run executes R repeats (ten by default). Repeat i derives its seed as
base_seed + i and produces, under out_dir/repeat-<i>/:

    manifest.json               process-protocol split of the process corpus
    stage1-symlink/             train/validation of the warm-up corpus (3:1)
    stage2-template/            train/validation of the generated corpus (3:1)
    stage3-process/             train/validation/test materialized from the
                                process manifest
    predictions.jsonl           decoded from the supplied score file
    report.json                 metrics on the repeat's test targets

The three stage directories are the training curriculum an external
trainer consumes in order; training itself is out of scope here. The
generated corpus of repeat i is built from pairs harvested from that
repeat's training papers only. Score files are optional; a repeat with a
missing or unreadable score file is reported as failed without aborting
the others. Reruns with identical inputs are byte-identical.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import tomli

from . import augmentor, decoder, evaluator, splitter
from .corpus import AnnotatedDocument, harvest_pairs, load_corpus, save_corpus
from .errors import DataError, VardefError
from .templates import TemplateSet, load_templates

DEFAULT_REPEATS = 10


@dataclass
class RunConfig:
    process_corpus: Path
    symlink_corpus: Path
    out_dir: Path
    base_seed: int = 42
    repeats: int = DEFAULT_REPEATS
    templates: Path | None = None  # None -> packaged 300-template set
    test_counts: dict[str, int] = field(default_factory=dict)
    split_ratio: tuple[int, int] = (3, 1)
    scores: str | None = None  # may contain "{repeat}"
    stopwords: Path | None = None
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.repeats < 1:
            raise DataError(f"repeats must be >= 1, got {self.repeats}")
        if self.jobs < 1:
            raise DataError(f"jobs must be >= 1, got {self.jobs}")


def load_config(path: str | Path) -> RunConfig:
    """Parse a TOML run config; relative paths resolve against the file."""
    path = Path(path)
    try:
        raw = tomli.loads(path.read_text(encoding="utf-8"))
    except tomli.TOMLDecodeError as exc:
        raise DataError(f"{path}: invalid config: {exc}") from exc

    base = path.parent

    def _path(key: str, required: bool = False) -> Path | None:
        value = raw.get(key)
        if value is None:
            if required:
                raise DataError(f"{path}: missing required key {key!r}")
            return None
        return (base / str(value)).resolve()

    ratio = raw.get("split_ratio", [3, 1])
    if not (isinstance(ratio, list) and len(ratio) == 2):
        raise DataError(f"{path}: split_ratio must be a two-element list")
    test_counts = raw.get("test_counts", {})
    if not isinstance(test_counts, dict):
        raise DataError(f"{path}: test_counts must be a table")

    scores = raw.get("scores")
    if scores is not None:
        # Keep {repeat} substitution intact; resolve the rest against the
        # config location.
        scores = str((base / str(scores)).resolve())

    return RunConfig(
        process_corpus=_path("process_corpus", required=True),
        symlink_corpus=_path("symlink_corpus", required=True),
        out_dir=_path("out_dir") or (base / "runs").resolve(),
        base_seed=int(raw.get("base_seed", 42)),
        repeats=int(raw.get("repeats", DEFAULT_REPEATS)),
        templates=_path("templates"),
        test_counts={str(k): int(v) for k, v in test_counts.items()},
        split_ratio=(int(ratio[0]), int(ratio[1])),
        scores=scores,
        stopwords=_path("stopwords"),
        jobs=int(raw.get("jobs", 1)),
    )


def packaged_template_path(size: int = 300) -> Path:
    """Path of a shipped template file (sizes 20, 100, 300)."""
    if size not in (20, 100, 300):
        raise DataError(f"no packaged template set of size {size}")
    return Path(str(resources.files("vardef").joinpath(f"data/templates_{size}.txt")))


@dataclass
class RepeatResult:
    experiment_id: int
    report: evaluator.MetricReport | None = None
    error: str | None = None


def _write_role_corpora(
    docs: list[AnnotatedDocument],
    manifest: splitter.SplitManifest,
    out_dir: Path,
    roles: tuple[str, ...],
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    splitter.save_manifest(manifest, out_dir / "manifest.json")
    by_role = splitter.apply_manifest(docs, manifest)
    for role in roles:
        save_corpus(by_role[role], out_dir / f"{role}.jsonl")


def _run_repeat(
    experiment_id: int,
    config: RunConfig,
    process_docs: list[AnnotatedDocument],
    symlink_docs: list[AnnotatedDocument],
    templates: TemplateSet,
    repeat_dir: Path,
) -> RepeatResult:
    seed = config.base_seed + experiment_id
    repeat_dir.mkdir(parents=True, exist_ok=True)

    process_manifest = splitter.split_process_corpus(
        process_docs,
        seed=seed,
        test_counts=config.test_counts or None,
        experiment_id=experiment_id,
    )
    splitter.save_manifest(process_manifest, repeat_dir / "manifest.json")
    by_role = splitter.apply_manifest(process_docs, process_manifest)

    stage3 = repeat_dir / "stage3-process"
    stage3.mkdir(parents=True, exist_ok=True)
    for role in (splitter.TRAIN, splitter.VALIDATION, splitter.TEST):
        save_corpus(by_role[role], stage3 / f"{role}.jsonl")

    pairs = harvest_pairs(by_role[splitter.TRAIN])
    generated = augmentor.augment(pairs, templates, seed=seed)
    tpl_manifest = splitter.split_ratio(
        generated, seed=seed, ratio=config.split_ratio, experiment_id=experiment_id
    )
    _write_role_corpora(
        generated,
        tpl_manifest,
        repeat_dir / "stage2-template",
        (splitter.TRAIN, splitter.VALIDATION),
    )

    symlink_manifest = splitter.split_ratio(
        symlink_docs, seed=seed, ratio=config.split_ratio, experiment_id=experiment_id
    )
    _write_role_corpora(
        symlink_docs,
        symlink_manifest,
        repeat_dir / "stage1-symlink",
        (splitter.TRAIN, splitter.VALIDATION),
    )

    if config.scores is None:
        return RepeatResult(experiment_id=experiment_id)

    score_path = Path(config.scores.replace("{repeat}", str(experiment_id)))
    try:
        records = decoder.load_score_file(score_path)
        predictions = decoder.decode_predictions(records)
        decoder.write_predictions(predictions, repeat_dir / "predictions.jsonl")
        pred_map = evaluator.load_predictions(repeat_dir / "predictions.jsonl")
        eval_records = evaluator.judge(by_role[splitter.TEST], pred_map)
        report = evaluator.score(eval_records)
        evaluator.write_report(report, repeat_dir / "report.json")
        return RepeatResult(experiment_id=experiment_id, report=report)
    except (OSError, VardefError) as exc:
        return RepeatResult(experiment_id=experiment_id, error=str(exc))


def run_experiment(config: RunConfig) -> list[RepeatResult]:
    """Run all repeats and write the aggregate; returns per-repeat results."""
    process_docs = load_corpus(config.process_corpus)
    symlink_docs = load_corpus(config.symlink_corpus)
    templates = load_templates(config.templates or packaged_template_path())

    config.out_dir.mkdir(parents=True, exist_ok=True)
    repeat_ids = list(range(1, config.repeats + 1))

    def job(i: int) -> RepeatResult:
        return _run_repeat(
            i,
            config,
            process_docs,
            symlink_docs,
            templates,
            config.out_dir / f"repeat-{i:02d}",
        )

    if config.jobs == 1:
        results = [job(i) for i in repeat_ids]
    else:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(job, repeat_ids))

    reports = {r.experiment_id: r.report for r in results if r.report is not None}
    payload: dict = {
        "repeats": config.repeats,
        "base_seed": config.base_seed,
        "completed": sorted(reports),
        "failed": {
            str(r.experiment_id): r.error for r in results if r.error is not None
        },
    }
    if reports:
        summaries = evaluator.aggregate(list(reports.values()))
        agg = evaluator.aggregate_to_dict(reports, summaries)
        payload["per_experiment"] = agg["per_experiment"]
        payload["summary"] = agg["summary"]
        evaluator.write_metrics_csv(reports, config.out_dir / "aggregate.csv")
    with (config.out_dir / "aggregate.json").open(
        "w", encoding="utf-8", newline="\n"
    ) as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return results
