"""Command line interface chaining the toolkit modules into workflows.

Exit codes: 0 success, 1 usage error, 2 data validation error, 3 internal
error. Failures emit a single machine-readable JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from . import decoder, evaluator, experiment, similarity, splitter
from .augmentor import augment
from .corpus import harvest_pairs, load_corpus, save_corpus, corpus_stats
from .errors import DataError, VardefError
from .templates import load_templates

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the toolkit reserves 2 for data."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"kind": "usage", "error": message}), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fail(kind: str, exc: Exception) -> None:
    print(json.dumps({"kind": kind, "error": str(exc)}), file=sys.stderr)


def _parse_kv_counts(items: list[str]) -> dict[str, int]:
    counts = {}
    for item in items:
        tag, _, value = item.partition("=")
        if not tag or not value:
            raise DataError(f"expected TAG=COUNT, got {item!r}")
        counts[tag] = int(value)
    return counts


def cmd_stats(args) -> int:
    stats = corpus_stats(load_corpus(args.corpus))
    if args.json:
        payload = {
            "num_docs": stats.num_docs,
            "num_variables": stats.num_variables,
            "num_with_definition": stats.num_with_definition,
            "per_process": {
                tag: {
                    "num_docs": p.num_docs,
                    "num_variables": p.num_variables,
                    "num_with_definition": p.num_with_definition,
                }
                for tag, p in stats.per_process.items()
            },
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(
            f"total: {stats.num_docs} papers / {stats.num_variables} variables / "
            f"{stats.num_with_definition} with definitions"
        )
        for tag, p in stats.per_process.items():
            print(
                f"  {tag}: {p.num_docs} papers / {p.num_variables} variables / "
                f"{p.num_with_definition} with definitions"
            )
    return EXIT_OK


def cmd_augment(args) -> int:
    pairs = harvest_pairs(load_corpus(args.pairs_from))
    templates = load_templates(args.templates)
    generated = augment(pairs, templates, seed=args.seed)
    save_corpus(generated, args.out)
    print(f"generated {len(generated)} sentences from {len(pairs)} pairs")
    return EXIT_OK


def cmd_split(args) -> int:
    docs = load_corpus(args.corpus)
    if args.granularity == "sentence":
        docs = splitter.explode_sentences(docs)
    if args.protocol == "process":
        manifest = splitter.split_process_corpus(
            docs,
            seed=args.seed,
            test_counts=_parse_kv_counts(args.test_counts) if args.test_counts else None,
            val_count=args.val_count,
            experiment_id=args.experiment_id,
        )
    else:
        a, _, b = args.ratio.partition(":")
        manifest = splitter.split_ratio(
            docs,
            seed=args.seed,
            ratio=(int(a), int(b)),
            experiment_id=args.experiment_id,
        )
    splitter.save_manifest(manifest, args.out)
    roles = {role: len(manifest.doc_ids(role)) for role in ("train", "validation", "test")}
    print(
        f"split {len(docs)} docs: {roles['train']} train / "
        f"{roles['validation']} validation / {roles['test']} test"
    )
    return EXIT_OK


def cmd_decode(args) -> int:
    records = decoder.load_score_file(args.scores)
    predictions = decoder.decode_predictions(records)
    decoder.write_predictions(predictions, args.out)
    print(f"decoded {len(predictions)} predictions")
    return EXIT_OK


def cmd_score(args) -> int:
    docs = load_corpus(args.gold)
    predictions = evaluator.load_predictions(args.pred)
    records = evaluator.judge(docs, predictions)
    report = evaluator.score(records)
    if args.out:
        evaluator.write_report(report, args.out)
    print(json.dumps(evaluator.report_to_dict(report), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_similarity(args) -> int:
    corpora = {}
    for item in args.corpora:
        name, _, path = item.partition("=")
        if not name or not path:
            raise DataError(f"expected NAME=PATH, got {item!r}")
        corpora[name] = load_corpus(path)
    stopwords = similarity.load_stopwords(args.stopwords)
    matrix = similarity.similarity_matrix(corpora, stopwords)
    percent = similarity.matrix_to_percent(matrix)
    if args.out:
        with Path(args.out).open("w", encoding="utf-8", newline="\n") as f:
            json.dump(
                {"names": list(corpora), "percent": percent},
                f,
                ensure_ascii=False,
                indent=2,
                sort_keys=True,
            )
            f.write("\n")
    names = list(corpora)
    width = max(len(n) for n in names)
    header = " ".join(f"{n:>{width}}" for n in names)
    print(f"{'':>{width}} {header}")
    for a in names:
        cells = " ".join(
            f"{'n/a' if percent[a][b] is None else percent[a][b]:>{width}}"
            for b in names
        )
        print(f"{a:>{width}} {cells}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = experiment.load_config(args.config)
    if args.out:
        config.out_dir = Path(args.out).resolve()
    if args.repeats is not None:
        config.repeats = args.repeats
    if args.base_seed is not None:
        config.base_seed = args.base_seed
    if args.scores:
        config.scores = str(Path(args.scores).resolve())
    if args.templates:
        config.templates = Path(args.templates).resolve()
    if args.jobs is not None:
        config.jobs = args.jobs
    config.__post_init__()

    results = experiment.run_experiment(config)
    failed = [r for r in results if r.error is not None]
    for r in failed:
        print(f"repeat {r.experiment_id} failed: {r.error}", file=sys.stderr)
    print(
        f"ran {len(results)} repeats, {len(results) - len(failed)} complete, "
        f"outputs in {config.out_dir}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vardef", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("corpus")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("augment", help="generate definition sentences from templates")
    p.add_argument("--pairs-from", required=True, help="corpus to harvest pairs from")
    p.add_argument("--templates", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("split", help="write a split manifest")
    p.add_argument("--corpus", required=True)
    p.add_argument("--protocol", choices=("process", "ratio"), default="process")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--test-counts", nargs="*", metavar="TAG=COUNT")
    p.add_argument("--val-count", type=int, default=1)
    p.add_argument("--ratio", default="3:1")
    p.add_argument("--granularity", choices=("paper", "sentence"), default="paper")
    p.add_argument("--experiment-id", type=int, default=1)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("decode", help="decode score files into predictions")
    p.add_argument("--scores", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", help="evaluate predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("similarity", help="pairwise definition-vocabulary overlap")
    p.add_argument("--corpora", nargs="+", required=True, metavar="NAME=PATH")
    p.add_argument("--stopwords")
    p.add_argument("--out")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("experiment", help="run the full repeated-split workflow")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--repeats", type=int)
    p.add_argument("--base-seed", type=int)
    p.add_argument("--scores")
    p.add_argument("--templates")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        _fail("data", exc)
        return EXIT_DATA
    except OSError as exc:
        _fail("io", exc)
        return EXIT_DATA
    except VardefError as exc:
        _fail("internal", exc)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last resort
        _fail("internal", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
