"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
in the terminal summary.

Oracles are coded separately from the library: plain set arithmetic for the
filter scores, a dense linear solve for the rank fixed point, hand-counted
confusion matrices for the metrics.
"""
import itertools
import random
import time

import numpy as np
import pytest

from apiscenarios.catalog import ApiRecord, Mention, dependency_max_incoming
from apiscenarios.corpus import CodeBlock, Sentence
from apiscenarios.evaluation import EvalReport, evaluate
from apiscenarios.linker import (MentionApiTuple, coverage, dependency_filter, method_similarity,
                                 probabilistic_link, type_similarity)
from apiscenarios.opinion import NEGATIVE, NEUTRAL, POSITIVE, SentimentLexicon, classify_sentence
from apiscenarios.pipeline import mine, scenarios_json
from apiscenarios.config import Config
from apiscenarios.snippets import ParsedSnippet
from apiscenarios.summarizer import TextGraph, rank_nodes
from apiscenarios.synthetic import (GSON, OFF_TOPIC, ORG_JSON, linking_benchmark, motivating_catalog,
                                    motivating_thread, synthetic_corpus)

# tolerances and sizes
RUNTIME_FIXTURE_S = 1.0
N_SIMILARITY_PAIRS = 1000
N_DAGS, MAX_DAG_NODES = 200, 8
N_PRIOR_SETS = 100
N_GRAPHS, MAX_GRAPH_NODES = 100, 6
RANK_MAX_DEVIATION = 1e-6
RANK_TOL = 1e-10  # stopping threshold handed to rank_nodes; see README
ISOLATED_ABS = 1e-15
N_FUZZ_SENTENCES = 500
BENCH_THREADS = 50
BENCH_AMBIGUOUS = 20
CORPUS_POSTS = 1000
RUNTIME_CORPUS_S = 60.0


def snip(types=(), methods=()):
    return ParsedSnippet(CodeBlock.from_raw(""), types_used=frozenset(types),
                         methods_used=frozenset(methods))


def as_tuple(api, i=0):
    return MentionApiTuple(Mention(api.name, Sentence("s", 0), i), api, "exact", (1, i))


# 1 -------------------------------------------------------------------------

def test_c1_motivating_fixture(fig_thread, fig_catalog, lexicon, detail):
    """C1 motivating fixture: 2 scenarios, reactions {C1,C2}/{C3,C4}, off-topic excluded, < 1 s"""
    thread, catalog = motivating_thread(), motivating_catalog()
    start = time.perf_counter()
    result = mine([thread], catalog, lexicon)
    elapsed = time.perf_counter() - start
    detail(f"{elapsed * 1000:.1f} ms")
    assert elapsed < RUNTIME_FIXTURE_S
    assert [s.api.d_api for s in result] == [GSON, ORG_JSON]
    assert [{r.comment_id for r in s.reactions} for s in result] == [{"C1", "C2"}, {"C3", "C4"}]
    gson, orgjson = result.scenarios
    assert [s.text for s in gson.description.solution_summary] == [
        "Gson can deserialize the whole array in one call.",
        "You need a TypeToken so that it keeps the generic list type."]
    assert [s.text for s in orgjson.description.solution_summary] == [
        "Alternatively, org.json lets you walk the array by hand."]
    for s in result:
        d = s.description
        assert d.problem_summary and d.solution_summary
        assert OFF_TOPIC not in [x.text for x in d.problem_summary + d.solution_summary]


# 2 -------------------------------------------------------------------------

def test_c2_similarity_oracle(detail):
    """C2 type/method similarity equals a set-intersection oracle on 1000 random pairs"""
    rng = random.Random(20)
    pool_t = [f"T{i}" for i in range(12)]
    pool_m = [f"m{i}" for i in range(12)]
    mismatches = 0
    for _ in range(N_SIMILARITY_PAIRS):
        st = set(rng.sample(pool_t, rng.randint(0, 6)))
        sm = set(rng.sample(pool_m, rng.randint(0, 6)))
        at = set(rng.sample(pool_t, rng.randint(0, 8)))
        am = set(rng.sample(pool_m, rng.randint(0, 8)))
        split = rng.randint(0, len(am))
        owners = {"A": frozenset(sorted(am)[:split]), "B": frozenset(sorted(am)[split:])}
        api = ApiRecord("cand", types=frozenset(at), methods=owners)
        s = snip(st, sm)
        want_t = len(st & at) / len(st) if st else 0.0
        want_m = len(sm & am) / len(sm) if sm else 0.0
        mismatches += type_similarity(s, api) != want_t
        mismatches += method_similarity(s, api) != want_m
    detail(f"{mismatches} mismatches over {N_SIMILARITY_PAIRS} pairs")
    assert mismatches == 0


# 3 -------------------------------------------------------------------------

def brute_incoming(nodes, edges):
    counts = {n: sum(1 for a, b in edges if b == n) for n in nodes}
    best = max(counts.values())
    return {n for n, c in counts.items() if c == best}


def test_c3_dependency_filter(detail):
    """C3 dependency filter: C2 wins the five-node example and matches brute force on 200 DAGs"""
    deps = {"C1": ["C2"], "C3": ["C2"], "C4": ["C5"], "C5": ["C2"], "C2": []}
    apis = [ApiRecord(n, dependencies=tuple(d)) for n, d in deps.items()]
    winners = dependency_filter([as_tuple(a, i) for i, a in enumerate(apis)])
    assert [t.api.name for t in winners] == ["C2"]

    rng = random.Random(30)
    bad = 0
    for _ in range(N_DAGS):
        n = rng.randint(2, MAX_DAG_NODES)
        names = [f"N{i}" for i in range(n)]
        # edges only from lower to higher index keeps the graph acyclic
        edges = [(names[i], names[j]) for i, j in itertools.combinations(range(n), 2)
                 if rng.random() < 0.35]
        records = [ApiRecord(x, dependencies=tuple(b for a, b in edges if a == x)) for x in names]
        rng.shuffle(records)
        want = brute_incoming(names, edges)
        got_core = {a.name for a in dependency_max_incoming(records)}
        got_filter = {t.api.name for t in dependency_filter([as_tuple(a, i) for i, a in enumerate(records)])}
        expected_filter = want if edges else set(names)
        bad += got_core != want or got_filter != expected_filter
    detail(f"{bad} disagreements over {N_DAGS} DAGs")
    assert bad == 0


# 4 -------------------------------------------------------------------------

def test_c4_probabilistic_coverage(detail):
    """C4 coverage: worked example links to A1 (2 vs 1) and matches brute force on 100 prior sets"""
    prior = [({"T1"}, "A1"), ({"T1", "T5"}, "A1"), ({"T2"}, "A2")]
    assert dict(coverage({"T1", "T2"}, prior)) == {"A1": 2, "A2": 1}
    assert probabilistic_link(snip({"T1", "T2"}), prior).d_api == "A1"

    rng = random.Random(40)
    bad = 0
    for _ in range(N_PRIOR_SETS):
        prior = [(set(rng.sample(range(10), rng.randint(1, 4))), rng.choice("PQRS"))
                 for _ in range(rng.randint(0, 12))]
        types = set(rng.sample(range(10), rng.randint(0, 4)))
        brute = {}
        for ts, a in prior:
            if any(t in ts for t in types):
                brute[a] = brute.get(a, 0) + 1
        want = sorted(brute, key=lambda a: (-brute[a], a))[0] if brute else None
        got = probabilistic_link(snip(types), prior)
        bad += dict(coverage(types, prior)) != brute or (got.d_api if got else None) != want
    detail(f"{bad} disagreements over {N_PRIOR_SETS} prior sets")
    assert bad == 0


# 5 -------------------------------------------------------------------------

def fixed_point_oracle(w, d):
    """Solve WS = (1 - d) + d * M WS directly."""
    n = len(w)
    m = np.zeros((n, n))
    for j in range(n):
        total = sum(w[j][k] for k in range(n))
        for i in range(n):
            if total > 0:
                m[i, j] = w[j][i] / total
    return np.linalg.solve(np.eye(n) - d * m, np.full(n, 1 - d))


def graph_of(w):
    n = len(w)
    g = TextGraph([Sentence(f"s{i}", i) for i in range(n)])
    g.edges = [(i, j, float(w[i][j])) for i in range(n) for j in range(i + 1, n) if w[i][j] > 0]
    return g


def random_weights(rng, n):
    w = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.6), 1)
    return w + w.T


def test_c5_rank_nodes(detail):
    """C5 rank_nodes within 1e-6 of the fixed point on 100 graphs, isolated node 1 - d, order scale-invariant"""
    rng = np.random.default_rng(50)
    worst = worst_default = 0.0
    order_changes = 0
    for _ in range(N_GRAPHS):
        n = int(rng.integers(1, MAX_GRAPH_NODES + 1))
        d = float(rng.uniform(0.5, 0.95))
        w = random_weights(rng, n)
        want = fixed_point_oracle(w, d)
        got = rank_nodes(graph_of(w), d=d, tol=RANK_TOL, max_iter=10_000)
        assert got.converged
        worst = max(worst, float(np.max(np.abs(np.array([got.weights[i] for i in range(n)]) - want))))
        plain = rank_nodes(graph_of(w), d=d, max_iter=10_000)
        worst_default = max(worst_default, float(np.max(np.abs(
            np.array([plain.weights[i] for i in range(n)]) - want))))
        scaled = rank_nodes(graph_of(w * 10), d=d, tol=RANK_TOL, max_iter=10_000)
        key = lambda ws: sorted(range(n), key=lambda i: (-round(ws[i], 9), i))
        order_changes += key(got.weights) != key(scaled.weights)
    isolated = rank_nodes(graph_of(np.zeros((3, 3))), d=0.85)
    iso_err = max(abs(v - 0.15) for v in isolated.weights.values())
    detail(f"max deviation {worst:.2e} at tol={RANK_TOL:g}; {worst_default:.2e} at default tol; "
           f"isolated error {iso_err:.1e}; {order_changes} order changes under 10x scaling")
    assert worst < RANK_MAX_DEVIATION
    assert iso_err <= ISOLATED_ABS
    assert order_changes == 0


# 6 -------------------------------------------------------------------------

def oracle_score(tokens, entries, negations, window=3):
    total = 0
    for i, tok in enumerate(tokens):
        if tok in entries:
            flipped = any(t in negations for t in tokens[max(0, i - window):i])
            total += -entries[tok] if flipped else entries[tok]
    return total


def test_c6_sentiment(lexicon, detail):
    """C6 sentiment: 'not good' is negative with sum -1, 500 fuzzed sentences consistent, empty lexicon neutral"""
    r = classify_sentence("not good", lexicon)
    assert (r.label, r.score) == (NEGATIVE, -1)

    rng = random.Random(60)
    vocab = sorted(lexicon.entries)
    negs = sorted(w for w in lexicon.negation_words if w.isalpha())
    filler = ["the", "parser", "api", "call", "returns", "list", "for", "me", "was", "it"]
    empty = SentimentLexicon({}, lexicon.negation_words)
    bad = 0
    for _ in range(N_FUZZ_SENTENCES):
        tokens = [rng.choice(rng.choice([vocab, negs, filler, filler])) for _ in range(rng.randint(1, 12))]
        res = classify_sentence(" ".join(tokens), lexicon)
        sign = (res.score > 0) - (res.score < 0)
        bad += res.label != {1: POSITIVE, -1: NEGATIVE, 0: NEUTRAL}[sign]
        bad += res.score != oracle_score(tokens, lexicon.entries, lexicon.negation_words)
        e = classify_sentence(" ".join(tokens), empty)
        bad += (e.label, e.score) != (NEUTRAL, 0)
    detail(f"{bad} inconsistencies over {N_FUZZ_SENTENCES} sentences")
    assert bad == 0


# 7 -------------------------------------------------------------------------

X, Y, Z, W, INV = "api.x", "api.y", "api.z", "api.w", "invalid"

# (task, predictions, gold, (tp, fp, tn, fn)), counted by hand
EVAL_FIXTURES = [
    ("link", {"a": X}, {"a": X}, (1, 0, 0, 0)),
    ("link", {"a": Y}, {"a": X}, (0, 1, 0, 0)),
    ("link", {"a": None}, {"a": X}, (0, 0, 0, 1)),
    ("link", {"a": INV}, {"a": X}, (0, 0, 0, 1)),
    ("link", {"a": X}, {"a": INV}, (0, 1, 0, 0)),
    ("link", {"a": INV}, {"a": INV}, (0, 0, 1, 0)),
    ("link", {}, {"a": X, "b": INV}, (0, 0, 1, 1)),
    ("link", {"a": X, "b": Y, "c": Z, "d": None}, {"a": X, "b": X, "c": Z, "d": Y}, (2, 1, 0, 1)),
    ("link", {"a": X, "b": INV, "c": W, "d": None, "e": X},
     {"a": X, "b": INV, "c": INV, "d": INV, "e": Y}, (1, 2, 2, 0)),
    ("validity", {"a": INV}, {"a": INV}, (1, 0, 0, 0)),
    ("validity", {"a": "valid", "b": INV}, {"a": INV, "b": "valid"}, (0, 1, 0, 1)),
    ("validity", {"a": "valid", "b": "valid"}, {"a": "valid", "b": INV, "c": "valid"}, (0, 0, 2, 1)),
    ("validity", {"a": INV, "b": INV, "c": "valid", "d": "valid"},
     {"a": INV, "b": "valid", "c": "valid", "d": INV}, (1, 1, 1, 1)),
    ("summary", {"a": ["s1", "s2", "s3"]}, {"a": ["s1", "s2", "s4"]}, (2, 1, 0, 1)),
    ("summary", {"a": []}, {"a": ["s1"]}, (0, 0, 0, 1)),
    ("summary", {"a": ["s1"], "b": ["s5", "s6"]}, {"a": ["s1"], "b": []}, (1, 2, 0, 0)),
    ("summary", {}, {"a": ["s1", "s2"], "b": ["s3"]}, (0, 0, 0, 3)),
    ("reactions", {"a": ["c1", "c2"]}, {"a": ["c2", "c1"]}, (2, 0, 0, 0)),
    ("reactions", {"a": ["c1", "c1", "c3"]}, {"a": ["c1", "c2"]}, (1, 1, 0, 1)),
    ("reactions", {"a": ["c1"], "b": ["c2", "c3", "c4"]}, {"a": ["c9"], "b": ["c3"]}, (1, 3, 0, 1)),
]


def test_c7_metrics(detail):
    """C7 metrics: 20 hand-counted confusion matrices exact, formula identities on all count tuples"""
    wrong = []
    for k, (task, pred, gold, counts) in enumerate(EVAL_FIXTURES):
        r = evaluate(pred, gold, task)
        if (r.tp, r.fp, r.tn, r.fn) != counts:
            wrong.append(k)
    assert len(EVAL_FIXTURES) == 20

    checked = 0
    for tp, fp, tn, fn in itertools.product(range(7), repeat=4):
        r = EvalReport.from_counts(tp, fp, tn, fn)
        p = tp / (tp + fp) if tp + fp else None
        rec = tp / (tp + fn) if tp + fn else None
        a = (tp + tn) / (tp + fp + tn + fn) if tp + fp + tn + fn else None
        f = 2 * p * rec / (p + rec) if p is not None and rec is not None and p + rec else None
        assert (r.precision, r.recall, r.accuracy) == (p, rec, a)
        assert (r.f1 is None) == (f is None)
        if f is not None:
            assert r.f1 == pytest.approx(f, abs=1e-12)
        checked += 1
    detail(f"{len(EVAL_FIXTURES) - len(wrong)}/20 fixtures exact; {checked} count tuples checked")
    assert not wrong, f"fixtures with wrong counts: {wrong}"


# 8 -------------------------------------------------------------------------

def link_report(bench, lexicon, mode):
    result = mine(bench.threads(), bench.catalog(), lexicon, Config(mode=mode))
    return evaluate(result.predictions(), bench.gold, "link")


def test_c8_linking_benchmark(lexicon, detail):
    """C8 50-thread benchmark: P = R = 1.0 when unambiguous, full beats partial precision when ambiguous"""
    clean = linking_benchmark(BENCH_THREADS, seed=0)
    full = link_report(clean, lexicon, "full")
    amb = linking_benchmark(BENCH_THREADS, ambiguous=BENCH_AMBIGUOUS, seed=0)
    amb_full = link_report(amb, lexicon, "full")
    amb_partial = link_report(amb, lexicon, "partial")
    detail(f"unambiguous P={full.precision:.3f} R={full.recall:.3f}; ambiguous full "
           f"P={amb_full.precision:.3f} vs partial P={amb_partial.precision:.3f}")
    assert full.precision == 1.0 and full.recall == 1.0
    assert amb_full.precision > amb_partial.precision


# 9 -------------------------------------------------------------------------

def test_c9_determinism_and_scale(lexicon, detail):
    """C9 determinism: 1 vs 8 workers byte-identical, 1000-post corpus under 60 s"""
    bench = synthetic_corpus(CORPUS_POSTS, seed=9)
    assert bench.post_count >= CORPUS_POSTS
    threads, catalog, cfg = bench.threads(), bench.catalog(), Config()
    start = time.perf_counter()
    one = scenarios_json(mine(threads, catalog, lexicon, cfg, workers=1), cfg)
    elapsed = time.perf_counter() - start
    again = scenarios_json(mine(threads, catalog, lexicon, cfg, workers=1), cfg)
    eight = scenarios_json(mine(threads, catalog, lexicon, cfg, workers=8), cfg)
    detail(f"{bench.post_count} posts in {elapsed:.2f} s; {len(one)} bytes")
    assert one.encode() == again.encode() == eight.encode()
    assert elapsed < RUNTIME_CORPUS_S
