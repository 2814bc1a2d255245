"""Hypothesis tests, multiple-comparison corrections and ranking accuracy."""

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

__all__ = [
    "TrialOutcome",
    "rankdata",
    "mann_whitney_u",
    "mann_whitney_one_sided",
    "bonferroni",
    "benjamini_yekutieli",
    "chi_square_2x2",
    "miss_rate",
    "ranking_accuracy",
    "read_counts_csv",
    "EXACT_BELOW",
]

# Exact null distribution is used when either sample is smaller than this.
EXACT_BELOW = 8


@dataclass(frozen=True)
class TrialOutcome:
    mean_x: float
    mean_y: float
    p_value: float


def rankdata(values):
    """Ranks starting at 1; tied values share their mean rank."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(len(a))
    sa = a[order]
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and sa[j + 1] == sa[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1
        i = j + 1
    return ranks


def mann_whitney_u(x, y):
    """U statistic of ``x`` (number of pairs with x > y, ties counting half)."""
    x = list(x)
    y = list(y)
    ranks = rankdata(x + y)
    n1 = len(x)
    return float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)


def _exact_upper_tail(ranks, n1, observed):
    """P(rank sum of a random n1-subset >= observed), counting subsets by DP.

    Ranks are doubled so tied (half-integer) midranks stay integral.
    """
    doubled = np.rint(2 * np.asarray(ranks)).astype(np.int64)
    top = int(doubled.sum())
    ways = np.zeros((n1 + 1, top + 1))
    ways[0, 0] = 1.0
    for r in doubled:
        ways[1:, r:] += ways[:-1, :top + 1 - r].copy()
    target = int(round(2 * observed))
    hits = ways[n1, target:].sum()
    return float(hits / ways[n1].sum())


def mann_whitney_one_sided(x, y, method="auto"):
    """p-value of the one-sided Mann-Whitney test with alternative x > y.

    ``method`` is ``"exact"``, ``"normal"`` or ``"auto"`` (exact when either
    sample has fewer than ``EXACT_BELOW`` values).  The normal approximation
    uses tie and continuity corrections.
    """
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n1, n2 = len(x), len(y)
    if n1 == 0 or n2 == 0:
        raise ValueError("Mann-Whitney needs two non-empty samples")
    if method == "auto":
        method = "exact" if min(n1, n2) < EXACT_BELOW else "normal"
    ranks = rankdata(x + y)
    rank_sum = ranks[:n1].sum()
    if method == "exact":
        return min(1.0, _exact_upper_tail(ranks, n1, rank_sum))
    if method != "normal":
        raise ValueError(f"unknown method {method!r}")
    N = n1 + n2
    u = rank_sum - n1 * (n1 + 1) / 2.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(((tie_counts**3) - tie_counts).sum())
    var = n1 * n2 / 12.0 * ((N + 1) - tie_term / (N * (N - 1)))
    if var <= 0:
        return 1.0
    z = (u - n1 * n2 / 2.0 - 0.5) / math.sqrt(var)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def bonferroni(p_values, alpha=0.05):
    """Reject flags with threshold ``alpha / m``."""
    p = list(p_values)
    if not p:
        return []
    cut = alpha / len(p)
    return [v <= cut for v in p]


def benjamini_yekutieli(p_values, alpha=0.05):
    """Step-up false-discovery-rate control under arbitrary dependence."""
    p = np.asarray(list(p_values), dtype=float)
    m = len(p)
    if m == 0:
        return []
    c_m = sum(1.0 / i for i in range(1, m + 1))
    order = np.argsort(p, kind="mergesort")
    cuts = np.arange(1, m + 1) * alpha / (m * c_m)
    passing = np.flatnonzero(p[order] <= cuts)
    flags = np.zeros(m, dtype=bool)
    if len(passing):
        flags[order[: passing[-1] + 1]] = True
    return flags.tolist()


def chi_square_2x2(a, b, correction=True):
    """Pearson chi-square test on the table ``[a, b]`` of (miss, correct) counts.

    Returns ``(statistic, p_value)``.  A zero column yields ``(0.0, 1.0)``.
    """
    table = np.array([a, b], dtype=float)
    if table.shape != (2, 2) or (table < 0).any():
        raise ValueError("expected two rows of two nonnegative counts")
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    if (row == 0).any():
        raise ValueError("each row needs a positive total")
    if (col == 0).any():
        return 0.0, 1.0
    expected = np.outer(row, col) / table.sum()
    diff = np.abs(table - expected)
    if correction:
        diff = np.maximum(diff - 0.5, 0.0)
    stat = float((diff**2 / expected).sum())
    return stat, math.erfc(math.sqrt(stat / 2.0))


def miss_rate(counts):
    n_miss, n_corr = counts
    if n_miss + n_corr <= 0:
        raise ValueError("judgment counts sum to zero")
    return n_miss / (n_miss + n_corr)


def _agree(s_i, s_j, t_i, t_j):
    s_tie = s_i == s_j
    t_tie = t_i == t_j
    if s_tie or t_tie:
        return s_tie and t_tie
    return (s_i < s_j) == (t_i < t_j)


def ranking_accuracy(scores, counts, alpha, correction=True):
    """Share of significantly different pairs ordered alike by score and miss rate.

    ``scores`` maps sample id to score and ``counts`` maps sample id to
    ``(n_miss, n_corr)``.  A pair is used when its chi-square p-value is
    below ``alpha``; values above 1 therefore keep every pair.
    """
    ids = sorted(counts)
    missing = set(ids) ^ set(scores)
    if missing:
        raise ValueError(f"ids without both a score and counts: {sorted(missing)}")
    if len(ids) < 2:
        raise ValueError("ranking accuracy needs at least two samples")
    T = {g: miss_rate(counts[g]) for g in ids}
    agree = used = 0
    for i, j in combinations(ids, 2):
        _, p = chi_square_2x2(counts[i], counts[j], correction)
        if p < alpha:
            used += 1
            agree += _agree(scores[i], scores[j], T[i], T[j])
    if used == 0:
        raise ValueError("empty denominator: no pair is significant at this alpha")
    return agree / used


def read_counts_csv(text):
    """Parse ``sampleId,nMiss,nCorr`` rows into ``{id: (n_miss, n_corr)}``."""
    reader = csv.DictReader(io.StringIO(text))
    need = {"sampleId", "nMiss", "nCorr"}
    if reader.fieldnames is None or not need <= set(reader.fieldnames):
        raise ValueError("counts CSV needs columns sampleId,nMiss,nCorr")
    out = {}
    for row in reader:
        n_miss, n_corr = int(row["nMiss"]), int(row["nCorr"])
        if n_miss < 0 or n_corr < 0 or n_miss + n_corr == 0:
            raise ValueError(f"invalid counts for sample {row['sampleId']}")
        out[row["sampleId"]] = (n_miss, n_corr)
    return out
