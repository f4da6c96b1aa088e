import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vardef.corpus import Span
from vardef.errors import DataError
from vardef.evaluator import (
    EvalRecord,
    Klass,
    MetricReport,
    aggregate,
    classify,
    diff_failures,
    judge,
    load_predictions,
    score,
    trim_span,
)

from conftest import mk_doc, mk_sentence


def span(a, b):
    return Span(a, b)


def test_classify_examples():
    assert classify(span(10, 25), span(10, 25)) is Klass.TP
    assert classify(span(10, 25), span(5, 30)) is Klass.FP1_WIDE
    assert classify(span(10, 25), span(12, 20)) is Klass.FP1_NARROW
    assert classify(span(10, 25), span(20, 40)) is Klass.FP1_OTHER
    assert classify(None, span(3, 8)) is Klass.FP2
    assert classify(span(10, 25), None) is Klass.FN
    assert classify(None, None) is Klass.TN


def test_classify_one_sided_containment_edges():
    # shares one boundary but still strictly contains / is contained
    assert classify(span(10, 25), span(10, 30)) is Klass.FP1_WIDE
    assert classify(span(10, 25), span(10, 20)) is Klass.FP1_NARROW
    assert classify(span(10, 25), span(5, 25)) is Klass.FP1_WIDE
    assert classify(span(10, 25), span(15, 25)) is Klass.FP1_NARROW


maybe_interval = st.one_of(
    st.none(),
    st.tuples(st.integers(0, 40), st.integers(1, 20)).map(
        lambda t: Span(t[0], t[0] + t[1])
    ),
)


def _classify_reference(gold, predicted):
    """Independent transcription of the output-class table."""
    has_gold = gold is not None
    has_pred = predicted is not None
    if has_gold and has_pred:
        if (predicted.start, predicted.end) == (gold.start, gold.end):
            return Klass.TP
        if predicted.start <= gold.start and gold.end <= predicted.end:
            return Klass.FP1_WIDE
        if gold.start <= predicted.start and predicted.end <= gold.end:
            return Klass.FP1_NARROW
        return Klass.FP1_OTHER
    if has_gold:
        return Klass.FN
    return Klass.FP2 if has_pred else Klass.TN


@settings(max_examples=500, deadline=None)
@given(maybe_interval, maybe_interval)
def test_classify_partitions_the_space(gold, predicted):
    klass = classify(gold, predicted)
    assert isinstance(klass, Klass)
    assert klass is _classify_reference(gold, predicted)


def test_score_reference_fixture():
    counts = {
        Klass.TP: 5,
        Klass.FP1_WIDE: 1,
        Klass.FP2: 1,
        Klass.FN: 1,
        Klass.TN: 2,
    }
    report = MetricReport.from_counts(counts)
    assert report.accuracy == pytest.approx(0.7, abs=1e-12)
    assert report.precision == pytest.approx(5 / 7, abs=1e-12)
    assert report.recall == pytest.approx(5 / 7, abs=1e-12)
    assert report.f1 == pytest.approx(5 / 7, abs=1e-12)
    assert report.total == 10


def test_score_all_tp():
    report = MetricReport.from_counts({Klass.TP: 9})
    assert (
        report.accuracy == report.precision == report.recall == report.f1 == 1.0
    )


def test_score_all_tn_undefined_sentinels():
    report = MetricReport.from_counts({Klass.TN: 4})
    assert report.accuracy == 1.0
    assert report.precision is None
    assert report.recall is None
    assert report.f1 is None


def test_score_empty_records():
    report = score([])
    assert report.total == 0
    assert report.accuracy is None
    assert report.precision is None


def _record(i, klass):
    """Construct concrete intervals realizing a class."""
    gold = Span(10, 25)
    table = {
        Klass.TP: (gold, Span(10, 25)),
        Klass.FP1_WIDE: (gold, Span(8, 28)),
        Klass.FP1_NARROW: (gold, Span(12, 20)),
        Klass.FP1_OTHER: (gold, Span(20, 40)),
        Klass.FP2: (None, Span(3, 9)),
        Klass.FN: (gold, None),
        Klass.TN: (None, None),
    }
    g, p = table[klass]
    return EvalRecord.judge(f"d{i}", "v1", g, p)


def test_record_class_rederivable():
    for klass in Klass:
        rec = _record(0, klass)
        assert rec.klass is klass
        assert classify(rec.gold, rec.predicted) is klass


def test_score_counts_sum_and_formulas_random_tables():
    rng = random.Random(77)
    for _ in range(50):
        counts = {k: rng.randint(0, 30) for k in Klass}
        records = []
        i = 0
        for klass, n in counts.items():
            for _ in range(n):
                records.append(_record(i, klass))
                i += 1
        report = score(records)
        assert report.counts == counts
        assert report.total == len(records)

        tp = counts[Klass.TP]
        fp1 = counts[Klass.FP1_WIDE] + counts[Klass.FP1_NARROW] + counts[Klass.FP1_OTHER]
        fp2, fn, tn = counts[Klass.FP2], counts[Klass.FN], counts[Klass.TN]
        total = tp + fp1 + fp2 + fn + tn
        if total:
            assert report.accuracy == pytest.approx((tp + tn) / total, abs=1e-12)
            assert 0.0 <= report.accuracy <= 1.0
        if tp + fp1 + fp2:
            assert report.precision == pytest.approx(tp / (tp + fp1 + fp2), abs=1e-12)
        if tp + fp1 + fn:
            assert report.recall == pytest.approx(tp / (tp + fp1 + fn), abs=1e-12)
        if report.f1 is not None:
            pre, rec = report.precision, report.recall
            assert report.f1 == pytest.approx(2 * pre * rec / (pre + rec), abs=1e-12)
            assert (report.f1 == 0) == (tp == 0)


def test_aggregate_single_report():
    report = MetricReport.from_counts({Klass.TP: 3, Klass.FN: 1})
    summary = aggregate([report])
    for name in ("accuracy", "precision", "recall", "f1"):
        s = summary[name]
        assert s.mean == s.min == s.max == s.median == report.metric(name)
        assert s.undefined == 0


def test_aggregate_two_reports():
    a = MetricReport.from_counts({Klass.TP: 8, Klass.FN: 2})  # acc 0.8
    b = MetricReport.from_counts({Klass.TP: 9, Klass.FN: 1})  # acc 0.9
    summary = aggregate([a, b])
    assert summary["accuracy"].mean == pytest.approx(0.85)
    assert summary["accuracy"].median == pytest.approx(0.85)
    assert summary["accuracy"].min == pytest.approx(0.8)
    assert summary["accuracy"].max == pytest.approx(0.9)


def test_aggregate_excludes_undefined_with_count():
    defined = MetricReport.from_counts({Klass.TP: 1, Klass.TN: 1})
    undefined = MetricReport.from_counts({Klass.TN: 5})  # precision sentinel
    summary = aggregate([defined, undefined])
    assert summary["precision"].undefined == 1
    assert summary["precision"].mean == pytest.approx(1.0)
    assert summary["accuracy"].undefined == 0


def test_aggregate_empty_errors():
    with pytest.raises(DataError):
        aggregate([])


def test_aggregate_reproducible():
    reports = [
        MetricReport.from_counts({Klass.TP: i + 1, Klass.FN: 10 - i}) for i in range(10)
    ]
    assert aggregate(reports) == aggregate(reports)


def test_diff_failures_identical():
    records = [_record(i, k) for i, k in enumerate(Klass)]
    diff = diff_failures(records, records)
    assert all(v == 0 for v in diff.deltas.values())
    assert diff.failure_total_delta == 0
    assert diff.transitions == []


def test_diff_failures_single_transition():
    ours = [_record(0, Klass.TN)]
    baseline = [_record(0, Klass.FP2)]
    diff = diff_failures(ours, baseline)
    assert diff.deltas[Klass.FP2] == -1
    assert diff.deltas[Klass.TN] == 1
    assert diff.failure_total_delta == -1
    assert len(diff.transitions) == 1
    t = diff.transitions[0]
    assert (t.baseline, t.ours) == (Klass.FP2, Klass.TN)


def test_diff_failures_reference_shaped_column():
    """Counts shaped like the first repeat of the reference failure table:
    ours FN 34, wide 4, narrow 6, other 1, FP2 9 (54 failures) against a
    baseline with 9/6/10/1/39 (65 failures), so the total delta is -11."""
    ours_counts = {
        Klass.FN: 34,
        Klass.FP1_WIDE: 4,
        Klass.FP1_NARROW: 6,
        Klass.FP1_OTHER: 1,
        Klass.FP2: 9,
    }
    base_counts = {
        Klass.FN: 9,
        Klass.FP1_WIDE: 6,
        Klass.FP1_NARROW: 10,
        Klass.FP1_OTHER: 1,
        Klass.FP2: 39,
    }
    # 50 gold-bearing targets + 40 without; fill the remainder with TP/TN
    gold_classes = (Klass.TP, Klass.FP1_WIDE, Klass.FP1_NARROW, Klass.FP1_OTHER, Klass.FN)
    nogold_classes = (Klass.FP2, Klass.TN)

    def build(counts):
        seq = []
        for klass in gold_classes:
            seq.extend([klass] * counts.get(klass, 0))
        n_gold_failures = len(seq)
        seq.extend([Klass.TP] * (50 - n_gold_failures))
        for klass in nogold_classes:
            seq.extend([klass] * counts.get(klass, 0))
        seq.extend([Klass.TN] * (90 - len(seq)))
        return seq

    ours_seq, base_seq = build(ours_counts), build(base_counts)
    # same key must agree on gold presence between the two systems
    gold_bearing = lambda k: k in gold_classes
    ours_seq.sort(key=gold_bearing, reverse=True)
    base_seq.sort(key=gold_bearing, reverse=True)
    ours = [_record(i, k) for i, k in enumerate(ours_seq)]
    baseline = [_record(i, k) for i, k in enumerate(base_seq)]

    diff = diff_failures(ours, baseline)
    assert diff.failure_total_ours == 54
    assert diff.failure_total_baseline == 65
    assert diff.failure_total_delta == -11
    assert diff.deltas[Klass.FN] == 25
    assert diff.deltas[Klass.FP2] == -30


def test_diff_failures_key_mismatch():
    with pytest.raises(DataError, match="differ"):
        diff_failures([_record(0, Klass.TP)], [_record(1, Klass.TP)])


def test_trim_span():
    text = "x is  the rate  "
    assert trim_span(text, Span(5, 16)) == Span(6, 14)  # " the rate  " -> "the rate"
    assert trim_span(text, Span(4, 6)) is None  # whitespace only
    assert trim_span(text, None) is None


def test_judge_trims_and_matches():
    doc = mk_doc(
        "d1", "CSTR", mk_sentence("k denotes the rate.", ("v1", "k", "rate"))
    )
    gold = doc.sentences[0].variables[0].definition
    # prediction includes the leading space; trimming makes it an exact match
    predictions = {("d1", "v1"): Span(gold.start - 1, gold.end)}
    records = judge([doc], predictions)
    assert records[0].klass is Klass.TP


def test_judge_missing_prediction():
    doc = mk_doc("d1", "CSTR", mk_sentence("T rises.", ("v1", "T", None)))
    with pytest.raises(DataError, match="no prediction"):
        judge([doc], {})


def test_judge_ignores_extras_and_non_targets():
    from vardef.corpus import Sentence, VariableMention

    text = "T and q rise."
    sentence = Sentence(
        text=text,
        variables=(
            VariableMention("v1", Span(0, 1), "T", None, is_target=True),
            VariableMention("v2", Span(6, 7), "q", None, is_target=False),
        ),
    )
    doc = mk_doc("d1", "CSTR", sentence)
    predictions = {
        ("d1", "v1"): None,
        ("other-doc", "v9"): Span(0, 3),  # extra key is ignored
    }
    records = judge([doc], predictions)
    assert [r.var_id for r in records] == ["v1"]
    assert records[0].klass is Klass.TN


def test_load_predictions_round_trip(tmp_path):
    import json

    rows = [
        {"doc_id": "d1", "var_id": "v1", "predicted": {"start": 2, "end": 9}},
        {"doc_id": "d1", "var_id": "v2", "predicted": None},
    ]
    path = tmp_path / "p.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")
    predictions = load_predictions(path)
    assert predictions[("d1", "v1")] == Span(2, 9)
    assert predictions[("d1", "v2")] is None
    path.write_text(
        "\n".join(json.dumps(rows[0]) for _ in range(2)) + "\n", encoding="utf-8"
    )
    with pytest.raises(DataError, match="duplicate"):
        load_predictions(path)
