#!/usr/bin/env python3
"""Regenerate the shipped template files and the test fixture data.

Everything here is deterministic (hash-based, no global RNG), so rerunning
the script reproduces the checked-in files byte for byte:

    src/vardef/data/templates_300.txt    300 templates, histogram 120/42/42/24x4
    src/vardef/data/templates_100.txt    seeded subset, histogram 40/14/14/8x4
    src/vardef/data/templates_20.txt     seeded subset, histogram 8/2/2/2/2/2/2
    tests/fixtures/process_corpus.jsonl  five synthetic processes with the
                                         reference paper/variable/definition
                                         counts (47 / 1214 / 820)
    tests/fixtures/symlink_corpus.jsonl  small warm-up corpus stand-in
    tests/fixtures/mock-scores.jsonl     deterministic mock score file over
                                         every extraction target
    tests/fixtures/experiment.toml       ready-to-run experiment config

The synthetic corpora replace licensed source papers; definition phrases
are composed from disjoint per-process word pools except for a deliberate
CSTR/BD overlap, so vocabulary-similarity orderings are fixed by design.
"""

from __future__ import annotations

import hashlib
import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from vardef.corpus import (  # noqa: E402
    AnnotatedDocument,
    Sentence,
    Span,
    VariableMention,
    corpus_stats,
    harvest_pairs,
    save_corpus,
)
from vardef.decoder import mark_target  # noqa: E402
from vardef.similarity import (  # noqa: E402
    DEFAULT_STOPWORDS,
    build_vocabulary,
    similarity_matrix,
)
from vardef.templates import (  # noqa: E402
    def_token_histogram,
    load_templates,
    parse_template,
    subset_templates,
)

DATA_DIR = ROOT / "src" / "vardef" / "data"
FIXTURE_DIR = ROOT / "tests" / "fixtures"

SUBSET_SEED = 20240601

# ---------------------------------------------------------------------------
# Template authoring
# ---------------------------------------------------------------------------

CONTEXTS = ("mass balance", "energy balance", "sensitivity analysis")

ARITY1_ZERO = [
    "The parameter {v1} is held constant throughout the {ctx}.",
    "{v1} is treated as a tuning parameter in the {ctx}.",
    "The influence of {v1} on the {ctx} is examined below.",
    "An empirical correlation provides {v1} for the {ctx}.",
    "The governing equation d{v1}/dt = k*[A][B] closes the {ctx}.",
    "{v1} is obtained from the {ctx} by least squares.",
    "The {ctx} is insensitive to small changes in {v1}.",
    "A conservative upper bound on {v1} is adopted in the {ctx}.",
    "{v1} is updated at every iteration of the {ctx}.",
    "The {ctx} requires an initial guess for {v1}.",
    "{v1} enters the {ctx} as a lumped constant.",
    "The units of {v1} are chosen to simplify the {ctx}.",
    "{v1} is measured online during the {ctx}.",
    "Uncertainty in {v1} propagates through the {ctx}.",
    "The {ctx} is repeated for several values of {v1}.",
]

ARITY2_ZERO = [
    "{v1} and {v2} are related through the {ctx}.",
    "The ratio of {v1} to {v2} appears in the {ctx}.",
    "Both {v1} and {v2} are rescaled before the {ctx}.",
    "The {ctx} couples {v1} with {v2}.",
    "{v1} grows monotonically with {v2} in the {ctx}.",
    "The product of {v1} and {v2} is conserved in the {ctx}.",
    "{v1} is eliminated in favor of {v2} in the {ctx}.",
    "The {ctx} fixes {v1} once {v2} is known.",
    "{v1} and {v2} are fitted jointly in the {ctx}.",
    "The difference between {v1} and {v2} drives the {ctx}.",
]

ARITY3_ZERO = [
    "{v1}, {v2}, and {v3} satisfy the {ctx}.",
    "The {ctx} is written in terms of {v1}, {v2}, and {v3}.",
    "{v1}, {v2}, and {v3} are estimated simultaneously from the {ctx}.",
    "The {ctx} reduces to an algebraic relation among {v1}, {v2}, and {v3}.",
    "Dimensional analysis groups {v1}, {v2}, and {v3} in the {ctx}.",
    "{v1}, {v2}, and {v3} are tabulated for each case of the {ctx}.",
    "The {ctx} is solved after substituting {v1}, {v2}, and {v3}.",
]

ARITY4_ZERO = [
    "{v1}, {v2}, {v3}, and {v4} close the {ctx}.",
    "The {ctx} involves {v1}, {v2}, {v3}, and {v4}.",
    "{v1}, {v2}, {v3}, and {v4} are initialized before the {ctx}.",
]

ARITY5_ZERO = [
    "{v1}, {v2}, {v3}, {v4}, and {v5} parameterize the {ctx}.",
    "The {ctx} is evaluated on the grid spanned by {v1}, {v2}, {v3}, {v4}, and {v5}.",
    "{v1}, {v2}, {v3}, {v4}, and {v5} enter the {ctx} linearly.",
]

ARITY6_ZERO = [
    "{v1}, {v2}, {v3}, {v4}, {v5}, and {v6} are collected in the state vector of the {ctx}.",
    "The {ctx} is rerun for every combination of {v1}, {v2}, {v3}, {v4}, {v5}, and {v6}.",
]

SINGLE_VERBS = [
    "is defined as",
    "denotes",
    "stands for",
    "represents",
    "refers to",
    "is used to denote",
    "indicates",
    "corresponds to",
    "is introduced as",
    "is identified with",
    "measures",
    "quantifies",
    "is shorthand for",
    "expresses",
]

PLURAL_VERBS = [
    "denote",
    "stand for",
    "represent",
    "refer to",
    "are defined as",
    "correspond to",
    "indicate",
    "are introduced as",
    "are identified with",
    "measure",
    "quantify",
    "express",
    "are shorthand for",
    "are used to denote",
]

SINGLE_PREFIXES = ("", "Here, ", "In the following, ")
PLURAL_PREFIXES = ("", "Here, ", "In this model, ")
LIST_PREFIXES = ("", "Here, ", "In what follows, ")
LIST_VERBS = PLURAL_VERBS[:8]


def _listing(kind: str, n: int) -> str:
    slots = [f"[{kind}_{i}]" for i in range(1, n + 1)]
    if n == 1:
        return slots[0]
    return ", ".join(slots[:-1]) + f", and {slots[-1]}"


def build_template_lines() -> list[str]:
    lines: list[str] = []

    def subst(frame: str, ctx: str) -> str:
        out = frame.replace("{ctx}", ctx)
        for i in range(1, 7):
            out = out.replace(f"{{v{i}}}", f"[VAR_{i}]")
            out = out.replace(f"{{d{i}}}", f"[DEF_{i}]")
        return out

    for frames in (
        ARITY1_ZERO,
        ARITY2_ZERO,
        ARITY3_ZERO,
        ARITY4_ZERO,
        ARITY5_ZERO,
        ARITY6_ZERO,
    ):
        for frame in frames:
            for ctx in CONTEXTS:
                lines.append(subst(frame, ctx))

    for verb in SINGLE_VERBS:
        for prefix in SINGLE_PREFIXES:
            lines.append(f"{prefix}[VAR_1] {verb} [DEF_1].")

    for verb in PLURAL_VERBS:
        for prefix in PLURAL_PREFIXES:
            lines.append(
                f"{prefix}[VAR_1] and [VAR_2] {verb} [DEF_1] and [DEF_2], respectively."
            )

    for arity in (3, 4, 5, 6):
        vlist = _listing("VAR", arity)
        dlist = _listing("DEF", arity)
        for verb in LIST_VERBS:
            for prefix in LIST_PREFIXES:
                lines.append(f"{prefix}{vlist} {verb} {dlist}, respectively.")

    assert len(lines) == 300, len(lines)
    assert len(set(lines)) == 300, "duplicate template line"
    return lines


def write_template_files() -> None:
    lines = build_template_lines()
    for line in lines:
        parse_template(line)

    header_300 = (
        "# Curated template sentences, one per line; [VAR_i]/[DEF_i] are\n"
        "# placeholder tokens. Definition-token histogram: 120/42/42/24/24/24/24.\n"
    )
    path_300 = DATA_DIR / "templates_300.txt"
    path_300.write_text(header_300 + "\n".join(lines) + "\n", encoding="utf-8")

    t300 = load_templates(path_300)
    assert def_token_histogram(t300) == [120, 42, 42, 24, 24, 24, 24]

    t100 = subset_templates(t300, 100, [40, 14, 14, 8, 8, 8, 8], seed=SUBSET_SEED)
    header_100 = (
        f"# Seeded subset (seed {SUBSET_SEED}) of templates_300.txt preserving the\n"
        "# definition-token distribution: 40/14/14/8/8/8/8.\n"
    )
    (DATA_DIR / "templates_100.txt").write_text(
        header_100 + "\n".join(t.raw for t in t100.templates) + "\n", encoding="utf-8"
    )

    t20 = subset_templates(t100, 20, [8, 2, 2, 2, 2, 2, 2], seed=SUBSET_SEED)
    header_20 = (
        f"# Seeded subset (seed {SUBSET_SEED}) of templates_100.txt preserving the\n"
        "# definition-token distribution: 8/2/2/2/2/2/2.\n"
    )
    (DATA_DIR / "templates_20.txt").write_text(
        header_20 + "\n".join(t.raw for t in t20.templates) + "\n", encoding="utf-8"
    )


# ---------------------------------------------------------------------------
# Synthetic process corpus (reference counts: 47 papers, 1214 vars, 820 defs)
# ---------------------------------------------------------------------------

PROCESS_TABLE = {
    # tag: (papers, variables, with definitions)
    "CRYST": (11, 281, 200),
    "CSTR": (10, 169, 123),
    "BD": (10, 186, 125),
    "CZ": (9, 311, 196),
    "STHE": (7, 267, 176),
}

# Definition phrases are composed only of pool words plus stop words; the
# CSTR and BD pools deliberately share seven words, every other pair of
# pools is disjoint, so (CSTR, BD) is the unique most-similar pair.
PROCESS_PHRASES = {
    "CRYST": [
        "growth of the seed crystal",
        "size distribution of the population in the magma",
        "mass of solvent in the crystallizer",
        "supersaturation of the slurry",
        "solubility of the solute",
        "moment of the size distribution",
        "nucleation in the magma",
        "cooling of the crystallizer",
        "saturation of the solvent",
    ],
    "CSTR": [
        "concentration of the reactant in the feed stream",
        "temperature of the coolant at the inlet",
        "residence time of the stirred tank",
        "rate of conversion in the reactor",
        "volume of the tank",
        "density of the outlet stream",
        "temperature of the reactor",
        "concentration of the coolant",
    ],
    "BD": [
        "molar ratio of methanol to oil",
        "yield of the ester in the reactor",
        "rate of transesterification",
        "concentration of the catalyst",
        "temperature of the feed stream",
        "conversion of the alcohol",
        "concentration of glycerol in the stream",
    ],
    "CZ": [
        "axial gradient of the melt",
        "diameter of the silicon ingot",
        "power of the heater in the zone",
        "rotation of the crucible",
        "pull of the ingot",
        "height of the interface",
        "radius of solidification",
        "dopant in the melt",
    ],
    "STHE": [
        "heat transfer coefficient of the tube",
        "pressure drop in the shell",
        "area of the exchanger",
        "fouling of the bundle",
        "duty of the exchanger",
        "baffle spacing in the shell",
        "effectiveness of the pass",
        "pitch of the tube bundle",
    ],
    "SYM": [
        "embedding of the input sequence",
        "loss of the network on the batch",
        "gradient of the objective",
        "entropy of the output distribution",
        "norm of the weight matrix",
    ],
}

PROCESS_SYMBOLS = {
    "CRYST": ["G", "B", "L", "mu", "S", "M_T", "k_v", "n", "W", "sigma"],
    "CSTR": ["C_A", "T", "q", "V", "k_0", "tau", "rho", "C_p", "U_A", "T_c"],
    "BD": ["X_e", "K_m", "C_cat", "R_t", "Y", "M_r", "k_f", "T_b", "F_o", "A_c"],
    "CZ": ["v_p", "R_c", "G_a", "P_h", "omega", "H_m", "r_s", "C_d", "T_m", "z"],
    "STHE": ["U", "A_s", "dP", "N_b", "Q_d", "eps", "P_t", "D_s", "h_i", "F_t"],
    "SYM": ["x", "y", "theta", "W", "b", "eta", "L", "g"],
}

DEF_FRAMES = [
    "The quantity {var} denotes the {phrase} in this study.",
    "{var} stands for the {phrase}.",
    "Let {var} be the {phrase}.",
    "The symbol {var} represents the {phrase} throughout.",
]

DEF2_FRAMES = [
    "{v1} and {v2} stand for the {p1} and the {p2}, respectively.",
    "Here, {v1} and {v2} denote the {p1} and the {p2}.",
]

NODEF_FRAMES = [
    "The parameter {var} is introduced in the appendix.",
    "{var} appears in the boundary conditions.",
    "The value of {var} is taken from the literature.",
    "{var} is computed iteratively at each step.",
]

NODEF2_FRAMES = [
    "Both {v1} and {v2} are dimensionless groups.",
    "{v1} and {v2} are updated after each pass.",
]


def _hash_int(*parts: object) -> int:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _build_mentions(text: str, items: list[tuple[str, str, str | None]]):
    """Locate surfaces then definitions left to right with a moving cursor.

    All sentence frames place every variable before every definition
    phrase, in item order, so cursor-based search can never latch onto a
    wrong occurrence (e.g. "G_1" inside "G_12").
    """
    cursor = 0
    var_spans = {}
    for var_id, surface, _ in items:
        start = text.index(surface, cursor)
        var_spans[var_id] = Span(start, start + len(surface))
        cursor = start + len(surface)
    def_spans = {}
    for var_id, _, phrase in items:
        if phrase is None:
            continue
        start = text.index(phrase, cursor)
        def_spans[var_id] = Span(start, start + len(phrase))
        cursor = start + len(phrase)
    return tuple(
        VariableMention(
            var_id=var_id,
            span=var_spans[var_id],
            surface=surface,
            definition=def_spans.get(var_id),
            is_target=True,
        )
        for var_id, surface, phrase in items
    )


def build_document(tag: str, index: int, n_vars: int, n_defs: int) -> AnnotatedDocument:
    phrases = PROCESS_PHRASES[tag]
    symbols = PROCESS_SYMBOLS[tag]
    doc_id = f"{tag.lower()}-{index:02d}"

    sentences = []
    var_counter = 0
    defs_left = n_defs
    vars_left = n_vars

    def next_symbol() -> str:
        nonlocal var_counter
        var_counter += 1
        base = symbols[(var_counter + index) % len(symbols)]
        return f"{base}_{var_counter}"

    def next_phrase(k: int) -> str:
        return phrases[(k + index) % len(phrases)]

    step = 0
    while vars_left > 0:
        step += 1
        h = _hash_int(doc_id, "plan", step)
        if defs_left >= 2 and vars_left >= 2 and h % 3 == 0:
            v1, v2 = next_symbol(), next_symbol()
            p1 = next_phrase(step)
            p2 = next_phrase(step + 3)
            assert p1 != p2
            frame = DEF2_FRAMES[h % len(DEF2_FRAMES)]
            text = frame.format(v1=v1, v2=v2, p1=p1, p2=p2)
            items = [
                (f"v{var_counter - 1}", v1, p1),
                (f"v{var_counter}", v2, p2),
            ]
            defs_left -= 2
            vars_left -= 2
        elif defs_left >= 1:
            var = next_symbol()
            phrase = next_phrase(step)
            frame = DEF_FRAMES[h % len(DEF_FRAMES)]
            text = frame.format(var=var, phrase=phrase)
            items = [(f"v{var_counter}", var, phrase)]
            defs_left -= 1
            vars_left -= 1
        elif vars_left >= 2 and h % 3 == 0:
            v1, v2 = next_symbol(), next_symbol()
            frame = NODEF2_FRAMES[h % len(NODEF2_FRAMES)]
            text = frame.format(v1=v1, v2=v2)
            items = [
                (f"v{var_counter - 1}", v1, None),
                (f"v{var_counter}", v2, None),
            ]
            vars_left -= 2
        else:
            var = next_symbol()
            frame = NODEF_FRAMES[h % len(NODEF_FRAMES)]
            text = frame.format(var=var)
            items = [(f"v{var_counter}", var, None)]
            vars_left -= 1
        sentences.append(Sentence(text=text, variables=_build_mentions(text, items)))

    return AnnotatedDocument(doc_id=doc_id, process_tag=tag, sentences=tuple(sentences))


def _spread(total: int, buckets: int) -> list[int]:
    base, extra = divmod(total, buckets)
    return [base + (1 if i < extra else 0) for i in range(buckets)]


def build_process_corpus() -> list[AnnotatedDocument]:
    docs = []
    for tag, (papers, n_vars, n_defs) in PROCESS_TABLE.items():
        var_split = _spread(n_vars, papers)
        def_split = _spread(n_defs, papers)
        for i in range(papers):
            docs.append(build_document(tag, i + 1, var_split[i], def_split[i]))
    return docs


def build_symlink_corpus() -> list[AnnotatedDocument]:
    docs = []
    var_split = _spread(52, 8)
    def_split = _spread(34, 8)
    for i in range(8):
        docs.append(build_document("SYM", i + 1, var_split[i], def_split[i]))
    return docs


# ---------------------------------------------------------------------------
# Mock score file
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\[target\]|\w+|[^\w\s]")


def _tokenize_marked(marked: str):
    """Token strings and [start, end) offsets within the marked sentence."""
    return [(m.group(0), m.start(), m.end()) for m in _TOKEN_RE.finditer(marked)]


def _noise(doc_id: str, var_id: str, vector: str, i: int) -> float:
    return round(0.05 + 0.40 * (_hash_int(doc_id, var_id, vector, i) % 10_000) / 10_000, 6)


def build_score_records(docs) -> list[dict]:
    records = []
    for doc in docs:
        for sentence in doc.sentences:
            for mention in sentence.variables:
                if not mention.is_target:
                    continue
                marked, omap = mark_target(sentence, mention.var_id)
                tokens = ["[CLS]"]
                offsets: list[list[int] | None] = [None]
                for tok, s, e in _tokenize_marked(marked):
                    tokens.append(tok)
                    offsets.append(list(omap.to_original(s, e)))

                d = len(tokens)
                s_start = [_noise(doc.doc_id, mention.var_id, "start", i) for i in range(d)]
                s_end = [_noise(doc.doc_id, mention.var_id, "end", i) for i in range(d)]

                selector = _hash_int(doc.doc_id, mention.var_id, "mode") % 100
                gold = mention.definition
                if selector < 70:
                    # Truthful: boost the gold span, or [CLS] when no gold.
                    if gold is None:
                        s_start[0] = s_end[0] = 0.97
                    else:
                        k, l = _token_cover(offsets, gold)
                        s_start[k] = 0.95
                        s_end[l] = 0.95
                elif selector >= 85:
                    # Adversarial: miss existing golds, hallucinate otherwise.
                    if gold is None:
                        k = 1 + _hash_int(doc.doc_id, mention.var_id, "fk") % (d - 1)
                        l = k + _hash_int(doc.doc_id, mention.var_id, "fl") % (d - k)
                        s_start[k] = 0.95
                        s_end[l] = 0.95
                    else:
                        s_start[0] = s_end[0] = 0.97
                # 70..84: pure noise; the argmax lands anywhere.

                records.append(
                    {
                        "doc_id": doc.doc_id,
                        "var_id": mention.var_id,
                        "tokens": tokens,
                        "s_start": s_start,
                        "s_end": s_end,
                        "offset_map": offsets,
                    }
                )
    return records


def _token_cover(offsets, gold: Span) -> tuple[int, int]:
    """Indices of the first/last token inside the gold character span."""
    inside = [
        i
        for i, iv in enumerate(offsets)
        if iv is not None and iv[0] >= gold.start and iv[1] <= gold.end
    ]
    assert inside, "gold span covers no token"
    first, last = inside[0], inside[-1]
    # Boosted decode must project back exactly onto the gold interval.
    assert offsets[first][0] == gold.start and offsets[last][1] == gold.end
    return first, last


# ---------------------------------------------------------------------------


def check_corpus(docs) -> None:
    stats = corpus_stats(docs)
    assert stats.num_docs == 47, stats
    assert stats.num_variables == 1214, stats
    assert stats.num_with_definition == 820, stats
    for tag, (papers, n_vars, n_defs) in PROCESS_TABLE.items():
        p = stats.per_process[tag]
        assert (p.num_docs, p.num_variables, p.num_with_definition) == (
            papers,
            n_vars,
            n_defs,
        ), (tag, p)
    assert len(harvest_pairs(docs)) == 820

    by_tag = {}
    for doc in docs:
        by_tag.setdefault(doc.process_tag, []).append(doc)
    vocabs = {tag: build_vocabulary(ds, DEFAULT_STOPWORDS) for tag, ds in by_tag.items()}
    for a in vocabs:
        for b in vocabs:
            shared = len(vocabs[a] & vocabs[b])
            if {a, b} == {"CSTR", "BD"}:
                assert shared == 7, (a, b, vocabs[a] & vocabs[b])
            elif a != b:
                assert shared == 0, (a, b, vocabs[a] & vocabs[b])
    matrix = similarity_matrix(by_tag, DEFAULT_STOPWORDS)
    off = {
        (a, b): v for a, row in matrix.items() for b, v in row.items() if a != b
    }
    top = max(off, key=off.get)
    assert set(top) == {"CSTR", "BD"}, top


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)

    write_template_files()

    docs = build_process_corpus()
    check_corpus(docs)
    save_corpus(docs, FIXTURE_DIR / "process_corpus.jsonl")

    symlink = build_symlink_corpus()
    save_corpus(symlink, FIXTURE_DIR / "symlink_corpus.jsonl")

    records = build_score_records(docs)
    assert len(records) == 1214
    with (FIXTURE_DIR / "mock-scores.jsonl").open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False))
            f.write("\n")

    (FIXTURE_DIR / "experiment.toml").write_text(
        "# Experiment config used by the end-to-end tests.\n"
        "# Paths are relative to this file.\n"
        "base_seed = 2024\n"
        "repeats = 2\n"
        'process_corpus = "process_corpus.jsonl"\n'
        'symlink_corpus = "symlink_corpus.jsonl"\n'
        'scores = "mock-scores.jsonl"\n'
        'out_dir = "runs"\n',
        encoding="utf-8",
    )

    print("template files:", [p.name for p in sorted(DATA_DIR.glob("templates_*.txt"))])
    print("fixtures:", [p.name for p in sorted(FIXTURE_DIR.iterdir())])


if __name__ == "__main__":
    main()
