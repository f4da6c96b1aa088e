import random

import pytest

from vardef.errors import DataError, ParseError
from vardef.templates import (
    def_token_histogram,
    load_templates,
    parse_template,
    subset_templates,
)

from vardef.experiment import packaged_template_path

from conftest import mk_templates

REFERENCE_HISTOGRAMS = {
    20: [8, 2, 2, 2, 2, 2, 2],
    100: [40, 14, 14, 8, 8, 8, 8],
    300: [120, 42, 42, 24, 24, 24, 24],
}


def test_parse_single_pair():
    t = parse_template("[VAR_1] is defined as [DEF_1].")
    assert t.var_slots == 1
    assert t.def_slots == 1


def test_parse_two_pairs():
    t = parse_template("[VAR_1] and [VAR_2] denote [DEF_1] and [DEF_2].")
    assert t.var_slots == 2
    assert t.def_slots == 2


def test_indices_must_start_at_one():
    with pytest.raises(ParseError, match="contiguous"):
        parse_template("[VAR_2] equals [DEF_2].")


def test_def_without_matching_var():
    with pytest.raises(ParseError, match=r"DEF_2.*no matching"):
        parse_template("[VAR_1] is [DEF_2].")


def test_arity_cap():
    line = " ".join(f"[VAR_{i}]" for i in range(1, 8)) + " are listed."
    with pytest.raises(ParseError, match="exceeds"):
        parse_template(line)


def test_duplicate_placeholder():
    with pytest.raises(ParseError, match="more than once"):
        parse_template("[VAR_1] equals [VAR_1].")


def test_malformed_placeholder():
    with pytest.raises(ParseError, match="malformed"):
        parse_template("[VAR_x] is broken.")


def test_no_var_placeholder():
    with pytest.raises(ParseError, match="no \\[VAR"):
        parse_template("plain sentence")


def test_mixed_template_without_defs():
    # bracketed symbols that are not placeholders stay literal text
    t = parse_template("d[VAR_1]/dt = k[A][B]")
    assert t.var_slots == 1
    assert t.def_slots == 0


def test_set_requires_arity_one():
    with pytest.raises(DataError, match="arity-1"):
        mk_templates("[VAR_1] and [VAR_2] react.")


def test_load_skips_comments_and_blanks(tmp_path):
    path = tmp_path / "t.txt"
    path.write_text(
        "# comment\n\n[VAR_1] is defined as [DEF_1].\n[VAR_1] reacts.\n",
        encoding="utf-8",
    )
    tset = load_templates(path)
    assert tset.size == 2
    assert tset.templates[0].def_slots == 1


@pytest.mark.parametrize("size", [20, 100, 300])
def test_shipped_files_match_reference_histograms(size):
    tset = load_templates(packaged_template_path(size))
    assert tset.size == size
    assert def_token_histogram(tset) == REFERENCE_HISTOGRAMS[size]


def test_histogram_single_zero_def_template():
    tset = mk_templates("[VAR_1] appears here.")
    assert def_token_histogram(tset) == [1, 0, 0, 0, 0, 0, 0]


def test_subset_to_own_size_is_identity():
    tset = load_templates(packaged_template_path(20))
    sub = subset_templates(tset, 20, def_token_histogram(tset), seed=5)
    assert sub == tset


def test_subset_deterministic():
    tset = load_templates(packaged_template_path(100))
    a = subset_templates(tset, 20, REFERENCE_HISTOGRAMS[20], seed=7)
    b = subset_templates(tset, 20, REFERENCE_HISTOGRAMS[20], seed=7)
    assert a == b


def test_subset_histograms_exact():
    t300 = load_templates(packaged_template_path(300))
    t100 = subset_templates(t300, 100, REFERENCE_HISTOGRAMS[100], seed=11)
    assert def_token_histogram(t100) == REFERENCE_HISTOGRAMS[100]
    t20 = subset_templates(t100, 20, REFERENCE_HISTOGRAMS[20], seed=11)
    assert def_token_histogram(t20) == REFERENCE_HISTOGRAMS[20]


def test_shipped_subsets_are_monotone():
    raw300 = {t.raw for t in load_templates(packaged_template_path(300)).templates}
    raw100 = {t.raw for t in load_templates(packaged_template_path(100)).templates}
    raw20 = {t.raw for t in load_templates(packaged_template_path(20)).templates}
    assert raw20 <= raw100 <= raw300


def test_subset_infeasible_bucket():
    tset = mk_templates("[VAR_1] reacts.", "[VAR_1] is [DEF_1].")
    with pytest.raises(DataError, match="infeasible"):
        subset_templates(tset, 2, [0, 2, 0, 0, 0, 0, 0], seed=1)


def test_subset_sum_mismatch():
    tset = mk_templates("[VAR_1] reacts.")
    with pytest.raises(DataError, match="sums to"):
        subset_templates(tset, 2, [1, 0, 0, 0, 0, 0, 0], seed=1)


def _random_template_set(rng, n_templates):
    lines = []
    has_arity1 = False
    for i in range(n_templates):
        arity = rng.randint(1, 6)
        has_arity1 = has_arity1 or arity == 1
        n_defs = rng.randint(0, arity)
        vlist = " ".join(f"[VAR_{k}]" for k in range(1, arity + 1))
        dlist = " ".join(f"[DEF_{k}]" for k in range(1, n_defs + 1))
        lines.append(f"sentence {i}: {vlist} mean {dlist} here.".replace("  ", " "))
    if not has_arity1:
        lines.append(f"sentence {n_templates}: [VAR_1] closes the set.")
    return mk_templates(*lines)


def test_subset_histogram_fidelity_random_sets():
    rng = random.Random(20240601)
    for _ in range(50):
        tset = _random_template_set(rng, rng.randint(2, 40))
        hist = def_token_histogram(tset)
        # random feasible sub-histogram, forcing feasibility of arity-1
        target = [rng.randint(0, c) for c in hist]
        arity1_buckets = {
            t.def_slots for t in tset.templates if t.var_slots == 1
        }
        if not any(target[d] > 0 for d in arity1_buckets):
            d = min(arity1_buckets)
            target[d] = max(target[d], 1)
        sub = subset_templates(tset, sum(target), target, seed=rng.randint(0, 999))
        assert def_token_histogram(sub) == target
        # chosen templates preserve source order
        raws = [t.raw for t in tset.templates]
        chosen = [t.raw for t in sub.templates]
        assert sorted(chosen, key=raws.index) == chosen
