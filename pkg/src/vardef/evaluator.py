"""Judge predictions against gold spans and compute evaluation metrics.

Each prediction falls into exactly one of seven classes. With a gold
definition present: TP on exact interval match, FP1_wide when the
prediction strictly contains gold, FP1_narrow when strictly contained in
gold, FP1_other for any other non-empty prediction, FN when nothing was
predicted. Without gold: FP2 when something was predicted, TN otherwise.

Metrics over the class counts, with FP1 = wide + narrow + other:

    accuracy  = (TP + TN) / total
    precision = TP / (TP + FP1 + FP2)
    recall    = TP / (TP + FP1 + FN)
    f1        = harmonic mean of precision and recall

Zero-denominator ratios are reported as None (an explicit sentinel),
never silently as zero, and are excluded from aggregation with a count.
Exact match is taken after trimming whitespace at both interval ends;
trimming happens in judge(), classify() itself is pure interval logic.
"""

from __future__ import annotations

import csv
import enum
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import AnnotatedDocument, Span
from .errors import DataError, ParseError


class Klass(str, enum.Enum):
    TP = "TP"
    FP1_WIDE = "FP1_wide"
    FP1_NARROW = "FP1_narrow"
    FP1_OTHER = "FP1_other"
    FP2 = "FP2"
    FN = "FN"
    TN = "TN"


FAILURE_CLASSES = (
    Klass.FN,
    Klass.FP1_WIDE,
    Klass.FP1_NARROW,
    Klass.FP1_OTHER,
    Klass.FP2,
)

METRIC_NAMES = ("accuracy", "precision", "recall", "f1")


def classify(gold: Span | None, predicted: Span | None) -> Klass:
    """Map one (gold, predicted) pair to its output class."""
    if gold is None:
        return Klass.TN if predicted is None else Klass.FP2
    if predicted is None:
        return Klass.FN
    if predicted == gold:
        return Klass.TP
    if predicted.contains(gold):
        return Klass.FP1_WIDE
    if gold.contains(predicted):
        return Klass.FP1_NARROW
    return Klass.FP1_OTHER


@dataclass(frozen=True)
class EvalRecord:
    """One judged prediction; klass is re-derivable from gold/predicted."""

    doc_id: str
    var_id: str
    gold: Span | None
    predicted: Span | None
    klass: Klass

    @classmethod
    def judge(
        cls, doc_id: str, var_id: str, gold: Span | None, predicted: Span | None
    ) -> "EvalRecord":
        return cls(
            doc_id=doc_id,
            var_id=var_id,
            gold=gold,
            predicted=predicted,
            klass=classify(gold, predicted),
        )

    @property
    def key(self) -> tuple[str, str]:
        return (self.doc_id, self.var_id)


@dataclass(frozen=True)
class MetricReport:
    counts: dict[Klass, int]
    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def metric(self, name: str) -> float | None:
        if name not in METRIC_NAMES:
            raise DataError(f"unknown metric {name!r}")
        return getattr(self, name)

    @classmethod
    def from_counts(cls, counts: dict[Klass, int]) -> "MetricReport":
        full = {k: int(counts.get(k, 0)) for k in Klass}
        tp = full[Klass.TP]
        tn = full[Klass.TN]
        fp1 = full[Klass.FP1_WIDE] + full[Klass.FP1_NARROW] + full[Klass.FP1_OTHER]
        fp2 = full[Klass.FP2]
        fn = full[Klass.FN]
        total = tp + fp1 + fp2 + fn + tn

        acc = (tp + tn) / total if total else None
        pre = tp / (tp + fp1 + fp2) if tp + fp1 + fp2 else None
        rec = tp / (tp + fp1 + fn) if tp + fp1 + fn else None
        if pre is None or rec is None or pre + rec == 0:
            f1 = None
        else:
            f1 = 2 * pre * rec / (pre + rec)
        return cls(counts=full, accuracy=acc, precision=pre, recall=rec, f1=f1)


def score(records: list[EvalRecord]) -> MetricReport:
    """Count classes and compute the four metrics over judged records."""
    counts = {k: 0 for k in Klass}
    for rec in records:
        counts[rec.klass] += 1
    return MetricReport.from_counts(counts)


def trim_span(text: str, span: Span | None) -> Span | None:
    """Shrink an interval past leading/trailing whitespace; None if empty."""
    if span is None:
        return None
    start, end = span.start, span.end
    end = min(end, len(text))
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    return Span(start, end)


def judge(
    docs: list[AnnotatedDocument],
    predictions: dict[tuple[str, str], Span | None],
    trim: bool = True,
) -> list[EvalRecord]:
    """Judge every extraction target in docs against its prediction.

    Every is_target mention must have an entry in predictions; extra
    prediction keys (e.g. a score file covering a whole corpus while docs
    is one test split) are ignored.
    """
    records = []
    missing = []
    for doc in docs:
        for sentence, mention in doc.mentions():
            if not mention.is_target:
                continue
            key = (doc.doc_id, mention.var_id)
            if key not in predictions:
                missing.append(key)
                continue
            gold = mention.definition
            predicted = predictions[key]
            if trim:
                gold = trim_span(sentence.text, gold)
                predicted = trim_span(sentence.text, predicted)
            records.append(EvalRecord.judge(doc.doc_id, mention.var_id, gold, predicted))
    if missing:
        raise DataError(
            f"{len(missing)} extraction targets have no prediction, "
            f"first missing: {missing[:5]}"
        )
    return records


@dataclass(frozen=True)
class MetricSummary:
    mean: float | None
    min: float | None
    max: float | None
    median: float | None
    undefined: int  # reports whose metric was the undefined sentinel


def aggregate(reports: list[MetricReport]) -> dict[str, MetricSummary]:
    """Summarize each metric across repeated experiments.

    Undefined sentinels are excluded from the statistics; their count is
    carried so silent gaps cannot corrupt a distribution plot.
    """
    if not reports:
        raise DataError("cannot aggregate zero reports")
    out = {}
    for name in METRIC_NAMES:
        values = [r.metric(name) for r in reports]
        defined = [v for v in values if v is not None]
        if defined:
            summary = MetricSummary(
                mean=statistics.fmean(defined),
                min=min(defined),
                max=max(defined),
                median=statistics.median(defined),
                undefined=len(values) - len(defined),
            )
        else:
            summary = MetricSummary(
                mean=None, min=None, max=None, median=None, undefined=len(values)
            )
        out[name] = summary
    return out


@dataclass(frozen=True)
class Transition:
    doc_id: str
    var_id: str
    baseline: Klass
    ours: Klass


@dataclass(frozen=True)
class FailureDiff:
    deltas: dict[Klass, int]  # ours - baseline, per class
    failure_total_ours: int
    failure_total_baseline: int
    transitions: list[Transition] = field(default_factory=list)

    @property
    def failure_total_delta(self) -> int:
        return self.failure_total_ours - self.failure_total_baseline


def diff_failures(ours: list[EvalRecord], baseline: list[EvalRecord]) -> FailureDiff:
    """Per-class failure deltas against a baseline over the same targets."""
    ours_by_key = {r.key: r for r in ours}
    base_by_key = {r.key: r for r in baseline}
    if set(ours_by_key) != set(base_by_key):
        only_ours = sorted(set(ours_by_key) - set(base_by_key))
        only_base = sorted(set(base_by_key) - set(ours_by_key))
        raise DataError(
            f"record key sets differ: {len(only_ours)} only in ours "
            f"(first {only_ours[:3]}), {len(only_base)} only in baseline "
            f"(first {only_base[:3]})"
        )
    deltas = {k: 0 for k in Klass}
    transitions = []
    for rec in ours:
        deltas[rec.klass] += 1
        base = base_by_key[rec.key]
        deltas[base.klass] -= 1
        if base.klass != rec.klass:
            transitions.append(
                Transition(
                    doc_id=rec.doc_id,
                    var_id=rec.var_id,
                    baseline=base.klass,
                    ours=rec.klass,
                )
            )
    return FailureDiff(
        deltas=deltas,
        failure_total_ours=sum(1 for r in ours if r.klass in FAILURE_CLASSES),
        failure_total_baseline=sum(1 for r in baseline if r.klass in FAILURE_CLASSES),
        transitions=transitions,
    )


def load_predictions(path: str | Path) -> dict[tuple[str, str], Span | None]:
    """Load predictions JSONL keyed by (doc_id, var_id)."""
    path = Path(path)
    predictions: dict[tuple[str, str], Span | None] = {}
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
                key = (str(obj["doc_id"]), str(obj["var_id"]))
                raw = obj["predicted"]
                span = None if raw is None else Span(int(raw["start"]), int(raw["end"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{where}: malformed prediction: {exc}") from exc
            if key in predictions:
                raise ParseError(f"{where}: duplicate prediction for {key}")
            predictions[key] = span
    return predictions


def report_to_dict(report: MetricReport) -> dict:
    return {
        "counts": {k.value: report.counts[k] for k in Klass},
        "total": report.total,
        "metrics": {name: report.metric(name) for name in METRIC_NAMES},
    }


def write_report(report: MetricReport, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump(report_to_dict(report), f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def aggregate_to_dict(
    reports: dict[int, MetricReport], summaries: dict[str, MetricSummary]
) -> dict:
    return {
        "repeats": len(reports),
        "per_experiment": [
            {"experiment_id": i, **report_to_dict(reports[i])}
            for i in sorted(reports)
        ],
        "summary": {
            name: {
                "mean": s.mean,
                "min": s.min,
                "max": s.max,
                "median": s.median,
                "undefined": s.undefined,
            }
            for name, s in summaries.items()
        },
    }


def write_metrics_csv(reports: dict[int, MetricReport], path: str | Path) -> None:
    """Per-experiment metric table, one row per repeat, for plotting."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["experiment_id", *METRIC_NAMES])
        for i in sorted(reports):
            row = [i]
            for name in METRIC_NAMES:
                v = reports[i].metric(name)
                row.append("" if v is None else f"{v:.6f}")
            writer.writerow(row)
