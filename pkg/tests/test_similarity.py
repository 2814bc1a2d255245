import numpy as np
import pytest

from stylerank.features import extract_from_notes
from stylerank.forest import ForestConfig, fit_forest
from stylerank.pipeline import score
from stylerank.similarity import (
    ScoreReport,
    cosine,
    leaf_agreement,
    one_hot,
    per_feature_scores,
    style_score,
)
from stylerank.synthetic import STYLE_A, StyleProcess, generate_corpus

DISTANT = StyleProcess(
    name="distant",
    qualities=((0, 5, 10), (0, 1, 6), (0, 2)),
    quality_weights=(0.4, 0.3, 0.3),
    durations=(240, 120),
    duration_weights=(0.5, 0.5),
    roots=(0, 1, 3, 6, 8, 10),
    hold_bass=0.6,
)


def test_cosine_examples():
    v = np.array([1.0, 2.0, 0.5])
    assert cosine(v, v) == pytest.approx(1.0)
    assert cosine([1, 0, 1, 0], [0, 1, 0, 1]) == 0.0
    with pytest.raises(ValueError):
        cosine([0, 0], [1, 1])
    with pytest.raises(ValueError):
        cosine([1, 0], [1, 0, 0])


def test_half_agreement():
    counts = np.full(500, 4)
    a = np.zeros(500, dtype=int)
    b = np.where(np.arange(500) < 250, 0, 3)
    assert cosine(one_hot(a, counts), one_hot(b, counts)) == pytest.approx(0.5, abs=1e-12)
    assert leaf_agreement(a, b)[0, 0] == 0.5


def test_one_hot_norm():
    counts = np.array([3, 5, 2])
    v = one_hot([2, 0, 1], counts)
    assert v.sum() == 3 and len(v) == 10
    assert np.linalg.norm(v) == pytest.approx(np.sqrt(3))


def test_cosine_equals_leaf_fraction_on_random_forest():
    rng = np.random.default_rng(0)
    X = rng.random((40, 6))
    y = np.array([0] * 15 + [1] * 25)
    forest = fit_forest(X, y, ForestConfig(tree_count=64, seed=1))
    V = rng.random((30, 6))
    L = forest.apply(V)
    agree = leaf_agreement(L, L)
    for i in range(len(V)):
        for j in range(len(V)):
            c = cosine(one_hot(L[i], forest.leaf_counts), one_hot(L[j], forest.leaf_counts))
            assert abs(c - agree[i, j]) <= 1e-12


def test_style_score_examples():
    twin = {"F": np.array([1, 2, 0, 3])}
    assert style_score(twin, {"F": twin["F"][None, :]}) == 1.0
    cand = {"F": np.array([0, 0]), "G": np.array([1, 1])}
    corpus = {"F": np.array([[0, 0], [0, 1]]), "G": np.array([[1, 0], [0, 0]])}
    f = style_score({"F": cand["F"]}, {"F": corpus["F"]})
    g = style_score({"G": cand["G"]}, {"G": corpus["G"]})
    assert f == 0.75 and g == 0.25
    assert style_score(cand, corpus) == pytest.approx((f + g) / 2)
    reordered = {"G": corpus["G"][::-1], "F": corpus["F"][::-1]}
    assert style_score(dict(reversed(list(cand.items()))), reordered) == style_score(cand, corpus)
    with pytest.raises(ValueError):
        style_score({}, corpus)


def test_report_ranking_and_serialization():
    rep = ScoreReport(["b", "a", "c"], ["F", "G"],
                      np.array([[0.5, 0.5], [0.5, 0.5], [0.9, 0.7]]))
    assert rep.ranking == ["c", "a", "b"]
    g = rep.global_scores
    assert (np.diff([g[rep.candidate_ids.index(c)] for c in rep.ranking]) <= 0).all()
    assert rep.feature_score("c", "G") == 0.7
    back = ScoreReport.from_json(rep.to_json())
    assert back.ranking == rep.ranking
    assert np.allclose(back.per_feature[[back.candidate_ids.index(c) for c in "bac"]],
                       rep.per_feature)
    csv_back = ScoreReport.from_csv(rep.to_csv())
    assert rep.to_csv().splitlines()[0] == "candidateId,globalScore,F,G"
    assert csv_back.per_candidate == pytest.approx(rep.per_candidate)


def test_single_feature_per_feature_equals_global():
    rng = np.random.default_rng(3)
    cand = {"F": rng.integers(0, 4, (5, 20))}
    corp = {"F": rng.integers(0, 4, (7, 20))}
    rep = per_feature_scores(cand, corp)
    assert np.array_equal(rep.per_feature[:, 0], rep.global_scores)
    assert ((rep.global_scores >= 0) & (rep.global_scores <= 1)).all()


@pytest.fixture(scope="module")
def fixture_files():
    corpus = [extract_from_notes(p) for p in generate_corpus(STYLE_A, 15, 21)]
    near = [extract_from_notes(p) for p in generate_corpus(STYLE_A, 6, 22)]
    far = [extract_from_notes(p) for p in generate_corpus(DISTANT, 6, 23)]
    return corpus, near, far


def test_corpus_like_candidates_outrank_distant_ones(fixture_files):
    corpus, near, far = fixture_files
    rep = score(near + far, corpus, config=ForestConfig(tree_count=100, seed=5),
                candidate_ids=[f"near{i}" for i in range(6)] + [f"far{i}" for i in range(6)])
    g = rep.global_scores
    assert g[:6].mean() > g[6:].mean()
    assert set(rep.ranking[:6]) == {f"near{i}" for i in range(6)}
    assert ((g >= 0) & (g <= 1)).all()
    assert np.allclose(g, rep.per_feature.mean(axis=1))


def test_score_is_deterministic(fixture_files):
    corpus, near, far = fixture_files
    cfg = ForestConfig(tree_count=30, seed=8)
    a = score(near + far, corpus, ["ChordPCD", "ChordSize"], cfg)
    b = score(near + far, corpus, ["ChordPCD", "ChordSize"], cfg)
    assert a.to_json() == b.to_json()
    # a feature's column does not depend on which other features were chosen
    c = score(near + far, corpus, ["ChordSize"], cfg)
    assert np.array_equal(a.per_feature[:, 1], c.per_feature[:, 0])
