"""Evaluation harnesses: style-separation trials, human-judgment agreement and
model comparison.

All inputs are per-file feature dictionaries (``{feature: Counter}``) so a
corpus is extracted once and reused across many trials.
"""

import csv
import io
from dataclasses import dataclass, field, replace
from itertools import permutations

import numpy as np

from .corpus import make_trial_split
from .forest import ForestConfig
from .pipeline import RAW_METRICS, raw_distance_scores, score
from .stats import (
    TrialOutcome,
    benjamini_yekutieli,
    bonferroni,
    mann_whitney_one_sided,
    ranking_accuracy,
)

__all__ = [
    "STYLERANK",
    "run_style_trial",
    "summarize_trials",
    "Experiment1Result",
    "run_experiment1",
    "Experiment2Result",
    "run_experiment2",
    "random_baseline",
    "compare_models",
    "DEFAULT_ALPHAS",
]

STYLERANK = "stylerank"
DEFAULT_ALPHAS = (5.0, 0.5, 0.05, 0.005)


def _outcome(x, y):
    return TrialOutcome(float(np.mean(x)), float(np.mean(y)), mann_whitney_one_sided(x, y))


def run_style_trial(corpus, cand_a, cand_b, features=None, config=ForestConfig(),
                    baselines=(), workers=1):
    """Score both candidate groups against the corpus and compare them.

    Returns ``{method: TrialOutcome}`` for StyleRank and each requested raw
    distance baseline (``"cosine"``, ``"manhattan"``, ``"euclidean"``).
    """
    cand_a = list(cand_a)
    cand_b = list(cand_b)
    candidates = cand_a + cand_b
    n = len(cand_a)
    report = score(candidates, corpus, features, config, workers=workers)
    g = report.global_scores
    out = {STYLERANK: _outcome(g[:n], g[n:])}
    for metric in baselines:
        s = raw_distance_scores(candidates, corpus, features, metric)
        out[metric] = _outcome(s[:n], s[n:])
    return out


def summarize_trials(outcomes, alpha=0.05):
    """Table-style frequencies over a batch of trial outcomes.

    ``mu``: share of trials with mean_x > mean_y; ``sig``: share with
    p < alpha; ``fdr`` / ``bon``: share rejected after correcting across
    the batch.
    """
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no trials to summarize")
    p = [o.p_value for o in outcomes]
    return {
        "mu": float(np.mean([o.mean_x > o.mean_y for o in outcomes])),
        "sig": float(np.mean([v < alpha for v in p])),
        "fdr": float(np.mean(benjamini_yekutieli(p, alpha))),
        "bon": float(np.mean(bonferroni(p, alpha))),
        "trials": len(outcomes),
    }


@dataclass
class Experiment1Result:
    trials: list = field(default_factory=list)  # (size, index, method, TrialOutcome)
    summary: dict = field(default_factory=dict)  # (size, method) -> frequencies

    def trials_csv(self):
        """One row per trial, then one summary row per (size, method)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "trialIndex", "method", "meanX", "meanY", "p",
                    "mu", "sig", "fdr", "bon"])
        for size, i, method, o in self.trials:
            w.writerow([size, i, method, repr(o.mean_x), repr(o.mean_y), repr(o.p_value),
                        "", "", "", ""])
        for (size, method), s in self.summary.items():
            w.writerow([size, "summary", method, "", "", "",
                        s["mu"], s["sig"], s["fdr"], s["bon"]])
        return buf.getvalue()

    def summary_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["size", "method", "mu", "sig", "fdr", "bon", "trials"])
        for (size, method), s in self.summary.items():
            w.writerow([size, method, s["mu"], s["sig"], s["fdr"], s["bon"], s["trials"]])
        return buf.getvalue()

    def to_dict(self):
        return {
            "summary": [
                {"size": size, "method": method, **s}
                for (size, method), s in self.summary.items()
            ],
            "trials": [
                {"size": size, "trialIndex": i, "method": method,
                 "meanX": o.mean_x, "meanY": o.mean_y, "p": o.p_value}
                for size, i, method, o in self.trials
            ],
        }


def _trial_seed(seed, size, index):
    ss = np.random.SeedSequence(seed, spawn_key=(size, index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_experiment1(style_a, style_b, sizes, trials, features=None, config=ForestConfig(),
                    seed=0, baselines=tuple(RAW_METRICS), alpha=0.05, workers=1,
                    progress=None):
    """Repeated corpus / candidate splits of two styles, per corpus size.

    Forests are refit for every trial.  Corrections are applied across the
    trials of one (size, method) batch.
    """
    style_a = list(style_a)
    style_b = list(style_b)
    result = Experiment1Result()
    for size in sizes:
        if len(style_a) < 2 * size or len(style_b) < size:
            raise ValueError(
                f"size {size} needs {2 * size} files of style A and {size} of style B; "
                f"have {len(style_a)} and {len(style_b)}"
            )
        batch = {}
        for i in range(trials):
            s = _trial_seed(seed, size, i)
            corpus, ga, gb = make_trial_split(style_a, style_b, size, s)
            outcome = run_style_trial(
                corpus, ga, gb, features, replace(config, seed=s), baselines, workers
            )
            for method, o in outcome.items():
                batch.setdefault(method, []).append(o)
                result.trials.append((size, i, method, o))
            if progress is not None:
                progress(size, i)
        for method, outs in batch.items():
            result.summary[(size, method)] = summarize_trials(outs, alpha)
    return result


def random_baseline(counts, alphas=DEFAULT_ALPHAS, trials=10, seed=0):
    """Ranking accuracy of uniformly random scores, ``trials`` times per alpha.

    Returns an array of shape ``(trials, len(alphas))`` (NaN where no pair
    is significant).
    """
    rng = np.random.default_rng(seed)
    ids = sorted(counts)
    out = np.full((trials, len(alphas)), np.nan)
    for t in range(trials):
        scores = dict(zip(ids, rng.random(len(ids))))
        for k, alpha in enumerate(alphas):
            try:
                out[t, k] = ranking_accuracy(scores, counts, alpha)
            except ValueError:
                pass
    return out


@dataclass
class Experiment2Result:
    alphas: tuple
    rows: dict  # method -> (means, stderrs)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = ["method"]
        for a in self.alphas:
            header += [f"alpha={a}", f"stderr@{a}"]
        w.writerow(header)
        for method, (means, errs) in self.rows.items():
            row = [method]
            for m, e in zip(means, errs):
                row += [repr(float(m)), repr(float(e))]
            w.writerow(row)
        return buf.getvalue()

    def to_dict(self):
        return {
            "alphas": list(self.alphas),
            "rows": [
                {"method": m, "accuracy": [float(v) for v in means],
                 "stderr": [float(v) for v in errs]}
                for m, (means, errs) in self.rows.items()
            ],
        }


def _mean_stderr(samples):
    samples = np.asarray(samples, dtype=float)
    means = np.nanmean(samples, axis=0)
    counts = (~np.isnan(samples)).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        sd = np.nanstd(samples, axis=0, ddof=1) if len(samples) > 1 else np.zeros(samples.shape[1])
        err = np.where(counts > 1, sd / np.sqrt(np.maximum(counts, 1)), 0.0)
    return means, err


def run_experiment2(score_runs, counts, alphas=DEFAULT_ALPHAS, random_trials=10, seed=0):
    """Agreement between score rankings and human miss-classification rates.

    ``score_runs`` is a list of ``{sample id: score}`` maps (one per forest
    seed); the StyleRank row reports mean and standard error across them.
    """
    runs = list(score_runs)
    acc = np.full((len(runs), len(alphas)), np.nan)
    for r, scores in enumerate(runs):
        for k, alpha in enumerate(alphas):
            try:
                acc[r, k] = ranking_accuracy(scores, counts, alpha)
            except ValueError:
                pass
    rows = {
        "random": _mean_stderr(random_baseline(counts, alphas, random_trials, seed)),
        STYLERANK: _mean_stderr(acc),
    }
    return Experiment2Result(tuple(alphas), rows)


def compare_models(corpus, models, features=None, config=ForestConfig(), workers=1):
    """Pool every model's samples as candidates and compare score distributions.

    ``models`` maps model name to a list of per-file feature dictionaries.
    Returns ``(scores, rows)`` where ``scores`` maps model name to its score
    array and ``rows`` holds one ``(model_a, model_b, mean_a, mean_b, p)``
    entry per ordered pair, with ``p`` testing mean_a > mean_b.
    """
    names = list(models)
    if len(names) < 2:
        raise ValueError("need at least two models to compare")
    pooled, owner = [], []
    for name in names:
        files = list(models[name])
        if not files:
            raise ValueError(f"model {name!r} has no samples")
        pooled += files
        owner += [name] * len(files)
    report = score(pooled, corpus, features, config, workers=workers)
    g = report.global_scores
    owner = np.array(owner)
    scores = {name: g[owner == name] for name in names}
    rows = [
        (a, b, float(scores[a].mean()), float(scores[b].mean()),
         mann_whitney_one_sided(scores[a], scores[b]))
        for a, b in permutations(names, 2)
    ]
    return scores, rows
