"""Near-duplicate removal and trial splits for corpus experiments."""

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGNATURE_LENGTH",
    "PitchSignature",
    "pitch_signature",
    "levenshtein",
    "levenshtein_norm",
    "DedupResult",
    "dedup",
    "make_trial_split",
]

SIGNATURE_LENGTH = 100


@dataclass(frozen=True)
class PitchSignature:
    head: tuple
    tail: tuple


def pitch_signature(notes, length=SIGNATURE_LENGTH):
    """First and last ``length`` pitches with notes ordered by (onset, pitch)."""
    seq = [n.pitch for n in sorted(notes, key=lambda n: (n.onset, n.pitch))]
    return PitchSignature(tuple(seq[:length]), tuple(seq[-length:]) if seq else ())


def levenshtein(a, b):
    """Unit-cost edit distance, one vectorized DP row at a time."""
    a = list(a)
    b = list(b)
    if not a:
        return len(b)
    if not b:
        return len(a)
    bb = np.array(b, dtype=object) if not _numeric(b) else np.asarray(b)
    offsets = np.arange(len(b) + 1)
    prev = offsets.copy()
    for i, x in enumerate(a, 1):
        sub = prev[:-1] + (bb != x)
        cur = np.empty_like(prev)
        cur[0] = i
        cur[1:] = np.minimum(sub, prev[1:] + 1)
        # insertions: cur[j] = min(cur[j], cur[j-1] + 1), as a running minimum
        cur = np.minimum.accumulate(cur - offsets) + offsets
        prev = cur
    return int(prev[-1])


def _numeric(seq):
    return all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq)


def levenshtein_norm(a, b):
    """Edit distance divided by the longer length; 0 for two empty sequences."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


@dataclass
class DedupResult:
    kept: list
    removed: list
    pairs: list  # (i, j, head_dist, tail_dist) for each flagged pair

    def report_csv(self, names=None):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["fileA", "fileB", "headDist", "tailDist", "removed"])
        name = (lambda i: names[i]) if names is not None else str
        for i, j, hd, td in self.pairs:
            writer.writerow([name(i), name(j), repr(hd), repr(td), name(j)])
        return buf.getvalue()


def dedup(signatures, threshold=0.75):
    """Greedily drop later files that nearly duplicate an earlier kept one.

    Two files are duplicates when the normalized edit distance between their
    heads or between their tails is below ``threshold``.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    signatures = list(signatures)
    removed = set()
    pairs = []
    for i, si in enumerate(signatures):
        if i in removed:
            continue
        for j in range(i + 1, len(signatures)):
            if j in removed:
                continue
            sj = signatures[j]
            hd = levenshtein_norm(si.head, sj.head)
            td = levenshtein_norm(si.tail, sj.tail)
            if hd < threshold or td < threshold:
                removed.add(j)
                pairs.append((i, j, hd, td))
    kept = [i for i in range(len(signatures)) if i not in removed]
    return DedupResult(kept, sorted(removed), pairs)


def make_trial_split(style_a, style_b, n, seed):
    """Corpus and two candidate groups of size ``n`` each.

    The corpus and the first candidate group are disjoint draws from
    ``style_a``; the second candidate group is drawn from ``style_b``.
    """
    style_a = list(style_a)
    style_b = list(style_b)
    short = []
    if len(style_a) < 2 * n:
        short.append(f"style A has {len(style_a)} files, needs {2 * n}")
    if len(style_b) < n:
        short.append(f"style B has {len(style_b)} files, needs {n}")
    if short:
        raise ValueError("; ".join(short))
    rng = np.random.default_rng(seed)
    pa = rng.permutation(len(style_a))
    pb = rng.permutation(len(style_b))
    corpus = [style_a[i] for i in pa[:n]]
    group_a = [style_a[i] for i in pa[n:2 * n]]
    group_b = [style_b[i] for i in pb[:n]]
    return corpus, group_a, group_b
