"""Acceptance checks.  Each test prints one PASS/FAIL line, then asserts.

The slower checks (style separation, null calibration, full-pipeline
determinism) take a few minutes together on one core.
"""

import io
import time
from itertools import combinations, permutations

import numpy as np
import pytest
from conftest import write_style_dir

from stylerank.cli import main
from stylerank.corpus import levenshtein
from stylerank.experiments import DEFAULT_ALPHAS, STYLERANK, run_experiment1, run_experiment2
from stylerank.features import extract_from_notes
from stylerank.forest import ForestConfig, fit_forest
from stylerank.pipeline import score
from stylerank.pitch import pc_mask, pcd, reduce, tonnetz_distances, tonnetz_length
from stylerank.similarity import cosine, one_hot, style_score
from stylerank.stats import (
    benjamini_yekutieli,
    bonferroni,
    chi_square_2x2,
    mann_whitney_one_sided,
    rankdata,
)
from stylerank.synthetic import STYLE_A, STYLE_B, generate_corpus


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return emit


def test_pcd_cardinality(report):
    start = time.perf_counter()
    classes = {reduce(x, 12) for x in range(4096)}
    elapsed = time.perf_counter() - start
    ok = len(classes) == 352 and len({pcd(x) for x in range(4096)}) == 352 and elapsed < 1.0
    report("pcd cardinality", ok, f"{len(classes)} classes in {elapsed:.3f} s (want 352, < 1 s)")


def test_worked_example(report):
    x = pc_mask([60, 64, 67])
    ok = x == 145 and pcd(145) == 145 and pcd(137) == 137 and pcd(145) != pcd(137)
    report("major/minor worked example", ok,
           f"mask {x}, pcd(145)={pcd(145)}, pcd(137)={pcd(137)}")


def test_forest_similarity_identity(report):
    rng = np.random.default_rng(0)
    X = rng.random((60, 8))
    y = np.array([0] * 25 + [1] * 35)
    forest = fit_forest(X, y, ForestConfig(tree_count=200, seed=2))
    A = forest.apply(rng.random((150, 8)))
    B = forest.apply(rng.random((150, 8)))
    counts = forest.leaf_counts
    worst = 0.0
    for a, b in zip(A, B):
        c = cosine(one_hot(a, counts), one_hot(b, counts))
        worst = max(worst, abs(c - np.mean(a == b)))
    scores = [
        style_score({"F": A[i], "G": B[i]}, {"F": A[i + 1:i + 6], "G": B[i + 1:i + 6]})
        for i in range(0, 140, 5)
    ]
    in_range = all(0.0 <= s <= 1.0 for s in scores)
    report("forest/similarity identity", worst <= 1e-12 and in_range,
           f"150 pairs, max |cosine - leaf fraction| = {worst:.1e}; "
           f"{len(scores)} scores in [{min(scores):.3f}, {max(scores):.3f}]")


def _tonnetz_reference(pcs):
    D = tonnetz_distances()
    return min(sum(D[p[i], p[i + 1]] for i in range(len(p) - 1)) for p in permutations(pcs))


def _mw_null_upper_tail():
    """Tie-free 10 vs 10 rank-sum null distribution by full enumeration."""
    idx = np.array(list(combinations(range(1, 21), 10)))
    sums = idx.sum(axis=1)
    counts = np.bincount(sums)
    tail = counts[::-1].cumsum()[::-1]
    return tail / len(sums)


def _levenshtein_reference(a, b):
    D = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        D[i][0] = i
    for j in range(len(b) + 1):
        D[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            D[i][j] = min(D[i - 1][j] + 1, D[i][j - 1] + 1,
                          D[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return D[-1][-1]


def test_oracle_equivalences(report):
    start = time.perf_counter()
    bad = [s for k in range(1, 7) for s in combinations(range(12), k)
           if tonnetz_length(s) != _tonnetz_reference(s)]
    t_tonnetz = time.perf_counter() - start

    start = time.perf_counter()
    tail = _mw_null_upper_tail()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(300):
        v = rng.normal(size=20) + np.r_[np.full(10, rng.normal()), np.zeros(10)]
        x, y = v[:10], v[10:]
        exact = tail[int(rankdata(v)[:10].sum())]
        worst = max(worst, abs(mann_whitney_one_sided(x, y) - exact))
    t_mw = time.perf_counter() - start

    start = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        a = list(rng.integers(0, 6, rng.integers(0, 40)))
        b = list(rng.integers(0, 6, rng.integers(0, 40)))
        mismatches += levenshtein(a, b) != _levenshtein_reference(a, b)
    t_lev = time.perf_counter() - start

    ok = (not bad and worst <= 0.02 and mismatches == 0
          and max(t_tonnetz, t_mw, t_lev) < 60)
    report("oracle equivalences", ok,
           f"tonnetz DP vs brute force: {len(bad)} mismatches over 2509 sets ({t_tonnetz:.1f} s); "
           f"MW normal vs exact: max diff {worst:.4f} over 300 samples ({t_mw:.1f} s); "
           f"Levenshtein: {mismatches}/1000 mismatches ({t_lev:.1f} s)")


@pytest.fixture(scope="module")
def style_pools():
    pool_a = [extract_from_notes(p) for p in generate_corpus(STYLE_A, 300, 1)]
    pool_b = [extract_from_notes(p) for p in generate_corpus(STYLE_B, 100, 101)]
    return pool_a, pool_b


def test_style_separation(report, style_pools):
    pool_a, pool_b = style_pools
    res = run_experiment1(pool_a[:200], pool_b, [10], 50, config=ForestConfig(tree_count=500),
                          seed=1)
    mu = {m: res.summary[(10, m)]["mu"] for m in (STYLERANK, "cosine", "manhattan", "euclidean")}
    ok = mu[STYLERANK] >= 0.8 and all(mu[STYLERANK] > v for m, v in mu.items() if m != STYLERANK)
    report("style separation (size 10, 50 trials)", ok,
           "mu " + ", ".join(f"{m}={v:.2f}" for m, v in mu.items()))


def test_null_calibration(report, style_pools):
    pool_a, _ = style_pools
    res = run_experiment1(pool_a[:200], pool_a[200:], [10], 100,
                          config=ForestConfig(tree_count=500), seed=2, baselines=())
    s = res.summary[(10, STYLERANK)]
    report("null calibration (100 trials)", 0.0 <= s["sig"] <= 0.15,
           f"Sig={s['sig']:.2f} (want [0, 0.15]), mu={s['mu']:.2f}")


def test_experiment2_harness(report, style_pools):
    pool_a, pool_b = style_pools
    generated = pool_a[200:215] + pool_b[:15]
    rep = score(generated, pool_a[:20], config=ForestConfig(tree_count=500, seed=3),
                candidate_ids=[f"g{i:02d}" for i in range(30)])
    scores = rep.per_candidate
    # miss counts rise with the score rank; equal scores get equal counts
    levels = {v: k for k, v in enumerate(sorted(set(scores.values())))}
    counts = {g: (3 * levels[s], 100 - 3 * levels[s]) for g, s in scores.items()}
    res = run_experiment2([scores], counts, DEFAULT_ALPHAS, random_trials=10, seed=4)
    perfect = res.rows[STYLERANK][0]
    random_means = res.rows["random"][0]
    ok = (perfect == 1.0).all() and ((random_means >= 0.4) & (random_means <= 0.6)).all()
    report("judgment agreement harness", ok,
           f"aligned counts: {perfect.tolist()}; random mean over 10 trials: "
           + ", ".join(f"{a}->{m:.3f}" for a, m in zip(DEFAULT_ALPHAS, random_means)))


def test_rank_determinism_and_runtime(report, tmp_path):
    corpus, cands = tmp_path / "corpus", tmp_path / "cands"
    write_style_dir(corpus, STYLE_A, 20, 31)
    write_style_dir(cands, STYLE_A, 5, 32, prefix="a")
    write_style_dir(cands, STYLE_B, 5, 33, prefix="b")
    outputs, times = [], []
    for k in range(2):
        out = tmp_path / f"rank{k}.json"
        start = time.perf_counter()
        code = main(["rank", "--seed", "5", "--trees", "500", "--out", str(out),
                     str(corpus), str(cands)], stdout=io.StringIO(), stderr=io.StringIO())
        times.append(time.perf_counter() - start)
        outputs.append(out.read_bytes() if code == 0 else None)
    identical = outputs[0] is not None and outputs[0] == outputs[1]
    ok = identical and max(times) < 300
    report("rank determinism and runtime", ok,
           f"byte-identical={identical}; 20 corpus + 10 candidates, 31 features, 500 trees: "
           + ", ".join(f"{t:.1f} s" for t in times))


def test_statistical_units(report):
    bon = bonferroni([0.01, 0.04], 0.05)
    by = benjamini_yekutieli([0.01, 0.9], 0.05)
    chi = chi_square_2x2([12, 30], [12, 30])
    ok = bon == [True, False] and by == [True, False] and chi == (0.0, 1.0)
    report("corrections and chi-square units", ok,
           f"Bonferroni {bon}, BY {by}, chi-square on identical rows {chi}")
