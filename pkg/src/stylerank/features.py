"""Categorical feature distributions over chords and melody.

Every feature maps a window of consecutive chords (or melody pitches) to an
unsigned 64-bit category.  Evaluating it at every valid window position and
counting the categories (or summing chord durations, for duration-weighted
features) yields one :class:`collections.Counter` per file.

To compare files, categories are capped to a shared vocabulary of the most
widespread ones (:func:`build_vocabulary`) and each distribution becomes a
frequency vector (:func:`vectorize`).
"""

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .midi import extract_melody, segment_chords
from .pitch import (
    dissonance,
    pc,
    pc_mask,
    pcc,
    pcd,
    popcount,
    reduce,
    scale_signature,
    tonnetz_length,
    voice_motion,
)

__all__ = [
    "FeatureSpec",
    "CATALOG",
    "FEATURE_NAMES",
    "MAX_CATEGORIES",
    "resolve_features",
    "extract_feature",
    "extract_features",
    "extract_from_notes",
    "CategoryVocabulary",
    "FeatureMatrix",
    "build_vocabulary",
    "vectorize",
    "build_feature_matrix",
    "dump_distributions",
    "load_distributions",
    "matrix_to_csv",
]

MAX_CATEGORIES = 1000
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    arity: int
    duration_weighted: bool = False
    emits_set: bool = False
    melodic: bool = False
    func: object = field(default=None, repr=False, compare=False)


class _Chord:
    """Per-chord quantities shared by many features."""

    __slots__ = (
        "size", "pitches", "pset", "lo", "hi", "pcs", "onset_pcs", "tie_pcs",
        "onset_flags", "onset_pitches", "durations", "duration", "onset_time",
        "all_onsets", "_sc",
    )

    def __init__(self, chord):
        self.size = len(chord.notes)
        self.pitches = chord.pitches
        self.pset = frozenset(self.pitches)
        self.lo = min(self.pitches)
        self.hi = max(self.pitches)
        self.onset_flags = chord.onset_flags
        self.onset_pitches = chord.onset_pitches
        self.pcs = pc_mask(self.pitches)
        self.onset_pcs = pc_mask(self.onset_pitches)
        self.tie_pcs = pc_mask(
            p for p, f in zip(self.pitches, self.onset_flags) if not f
        )
        self.durations = frozenset(n.duration for n in chord.notes)
        self.duration = chord.duration_ticks
        self.onset_time = chord.onset_time
        self.all_onsets = all(self.onset_flags)
        self._sc = None

    @property
    def sc(self):
        if self._sc is None:
            self._sc = scale_signature(p % 12 for p in self.pitches)
        return self._sc


# --- chord features ---------------------------------------------------------


def _chord_dissonance(c):
    if not c.onset_pitches:
        return None
    d = dissonance(c.onset_pitches, c.onset_pitches)
    return d.numerator // d.denominator


def _chord_distinct_duration_ratio(c):
    return (1 << len(c.durations)) | (1 << c.size)


def _chord_duration(c, d):
    return d.onset_time - c.onset_time


def _chord_lowest_interval(c):
    rest = c.pset - {c.lo}
    if not rest:
        return None
    return min(rest) - c.lo


def _chord_onset(c):
    value = 0
    for i, f in enumerate(c.onset_flags):
        value |= f << i
    return value | (1 << c.size)


def _chord_onset_pcd(c):
    return pcd(c.onset_pcs)


def _chord_onset_ratio(c):
    return (1 << sum(c.onset_flags)) | (1 << c.size)


def _chord_onset_shape(c):
    if c.hi - c.lo > 63:
        return None
    value = 0
    for p, f in zip(c.pitches, c.onset_flags):
        value += f << (p - c.lo)
    return value


def _chord_onset_tie_pcd(c):
    return pcd(c.onset_pcs) + (pcd(c.tie_pcs) << 12)


def _chord_onset_tie_reduced(c):
    return reduce(c.onset_pcs + (c.tie_pcs << 12), 24)


def _chord_pcd(c):
    return pcd(c.pcs)


def _chord_pcd_w_bass(c):
    return pcd(c.pcs) + (1 << (12 + pc(c.lo)))


def _chord_pc_size_ratio(c):
    return (1 << popcount(c.pcs)) | (1 << len(c.pset))


def _chord_range(c):
    return c.hi - c.lo


def _chord_shape(c):
    if c.hi - c.lo > 63:
        return None
    value = 0
    for p in c.pset:
        value += 1 << (p - c.lo)
    return value


def _chord_size(c):
    return c.size


def _chord_tonnetz(c):
    return tonnetz_length(p % 12 for p in c.pset)


# --- chord transition features ----------------------------------------------


def _chord_size_ngram(a, b, c):
    return min(a.size, 255) + (min(b.size, 255) << 8) + (min(c.size, 255) << 16)


def _tran_bass_interval(a, b):
    return pc(b.lo - a.lo)


def _tran_dissonance(a, b):
    d = dissonance(a.pset, b.pset)
    return d.numerator // d.denominator


def _tran_distance(a, b):
    return abs(b.lo - a.lo) + abs(b.hi - a.hi)


def _tran_outer(a, b):
    return pc(a.hi - a.lo) + (pc(b.hi - b.lo) << 8) + (pc(a.lo - b.lo) << 16)


def _tran_pcd(a, b):
    return reduce(a.pcs + (b.pcs << 12), 24)


def _tran_repeat(a, b):
    return int(a.all_onsets and a.pset == b.pset)


def _tran_scale_distance(a, b):
    return popcount(a.sc ^ b.sc)


def _tran_scale_union(a, b):
    return popcount(a.sc | b.sc)


def _tran_voice_motion(a, b):
    return voice_motion(a.pset, b.pset)


# --- melody features --------------------------------------------------------


def _melody_ngram(*m):
    return sum(((m[i + 1] - m[i]) % 12) << (8 * i) for i in range(3))


def _melody_pcd(*m):
    return pcd(pc_mask(m))


# --- interval features ------------------------------------------------------


def _interval_pairs(c, fn):
    ps = sorted(c.pset)
    return {fn(hi - lo) for i, lo in enumerate(ps) for hi in ps[i + 1:]}


def _interval_class_dist(c):
    return _interval_pairs(c, pcc)


def _interval_dist(c):
    return _interval_pairs(c, pc)


def _spec(name, arity, func, weighted=False, emits_set=False, melodic=False):
    return FeatureSpec(name, arity, weighted, emits_set, melodic, func)


CATALOG = {
    s.name: s
    for s in (
        _spec("ChordDissonance", 1, _chord_dissonance, weighted=True),
        _spec("ChordDistinctDurationRatio", 1, _chord_distinct_duration_ratio),
        _spec("ChordDuration", 2, _chord_duration),
        _spec("ChordLowestInterval", 1, _chord_lowest_interval),
        _spec("ChordOnset", 1, _chord_onset),
        _spec("ChordOnsetPCD", 1, _chord_onset_pcd, weighted=True),
        _spec("ChordOnsetRatio", 1, _chord_onset_ratio),
        _spec("ChordOnsetShape", 1, _chord_onset_shape, weighted=True),
        _spec("ChordOnsetTiePCD", 1, _chord_onset_tie_pcd, weighted=True),
        _spec("ChordOnsetTieReduced", 1, _chord_onset_tie_reduced, weighted=True),
        _spec("ChordPCD", 1, _chord_pcd, weighted=True),
        _spec("ChordPCDWBass", 1, _chord_pcd_w_bass, weighted=True),
        _spec("ChordPCSizeRatio", 1, _chord_pc_size_ratio),
        _spec("ChordRange", 1, _chord_range),
        _spec("ChordShape", 1, _chord_shape, weighted=True),
        _spec("ChordSize", 1, _chord_size),
        _spec("ChordTonnetz", 1, _chord_tonnetz, weighted=True),
        _spec("ChordSizeNgram", 3, _chord_size_ngram),
        _spec("ChordTranBassInterval", 2, _tran_bass_interval),
        _spec("ChordTranDissonance", 2, _tran_dissonance),
        _spec("ChordTranDistance", 2, _tran_distance),
        _spec("ChordTranOuter", 2, _tran_outer),
        _spec("ChordTranPCD", 2, _tran_pcd),
        _spec("ChordTranRepeat", 2, _tran_repeat),
        _spec("ChordTranScaleDistance", 2, _tran_scale_distance),
        _spec("ChordTranScaleUnion", 2, _tran_scale_union),
        _spec("ChordTranVoiceMotion", 2, _tran_voice_motion),
        _spec("MelodyNgram", 4, _melody_ngram, melodic=True),
        _spec("MelodyPCD", 5, _melody_pcd, melodic=True),
        _spec("IntervalClassDist", 1, _interval_class_dist, emits_set=True),
        _spec("IntervalDist", 1, _interval_dist, emits_set=True),
    )
}

FEATURE_NAMES = tuple(CATALOG)


def resolve_features(names=None):
    """Map a feature-name selection (default: all) to catalog specs."""
    if names is None:
        return list(CATALOG.values())
    names = list(names)
    if not names:
        raise ValueError("feature selection is empty")
    unknown = [n for n in names if n not in CATALOG]
    if unknown:
        raise ValueError(f"unknown feature(s): {', '.join(unknown)}")
    return [CATALOG[n] for n in dict.fromkeys(names)]


def _evaluate(spec, views, melody):
    dist = Counter()
    if spec.melodic:
        for t in range(len(melody) - spec.arity + 1):
            v = spec.func(*melody[t:t + spec.arity])
            dist[v & _U64] += 1
        return dist
    for t in range(len(views) - spec.arity + 1):
        v = spec.func(*views[t:t + spec.arity])
        if v is None:
            continue
        if spec.emits_set:
            for x in v:
                dist[x & _U64] += 1
        else:
            dist[v & _U64] += views[t].duration if spec.duration_weighted else 1
    return dist


def extract_feature(spec, chords, melody=None):
    """Categorical distribution of one feature over a chord sequence."""
    if isinstance(spec, str):
        spec = resolve_features([spec])[0]
    if not chords:
        raise ValueError("no chords")
    if melody is None:
        melody = extract_melody(chords)
    return _evaluate(spec, [_Chord(c) for c in chords], list(melody))


def extract_features(chords, features=None, melody=None):
    """``{feature name: Counter}`` for every selected feature."""
    specs = resolve_features(features)
    if not chords:
        raise ValueError("no chords")
    if melody is None:
        melody = extract_melody(chords)
    views = [_Chord(c) for c in chords]
    melody = list(melody)
    return {s.name: _evaluate(s, views, melody) for s in specs}


def extract_from_notes(notes, features=None):
    chords = segment_chords(notes)
    return extract_features(chords, features)


# ---------------------------------------------------------------------------
# Vocabulary and vectors


@dataclass(frozen=True)
class CategoryVocabulary:
    kept: tuple
    document_frequency: dict
    feature: str = None

    def __len__(self):
        return len(self.kept)

    @property
    def index(self):
        return {c: j for j, c in enumerate(self.kept)}


def build_vocabulary(per_file, cap=MAX_CATEGORIES, feature=None):
    """Keep the ``cap`` categories present in the most files.

    Ties in document frequency go to the numerically smaller category.
    """
    per_file = list(per_file)
    if not per_file:
        raise ValueError("vocabulary needs at least one distribution")
    df = Counter()
    for dist in per_file:
        df.update(c for c, w in dist.items() if w > 0)
    kept = sorted(df, key=lambda c: (-df[c], c))[:cap]
    return CategoryVocabulary(tuple(kept), dict(df), feature)


def vectorize(dist, vocab):
    """Frequency vector of ``dist`` over ``vocab``; dropped mass is not renormalized."""
    out = np.zeros(len(vocab.kept))
    total = sum(dist.values())
    if total <= 0:
        return out
    for j, c in enumerate(vocab.kept):
        w = dist.get(c)
        if w:
            out[j] = w / total
    return out


@dataclass
class FeatureMatrix:
    vocabulary: CategoryVocabulary
    rows: np.ndarray
    labels: np.ndarray
    empty_rows: tuple = ()


def build_feature_matrix(candidates, corpus, cap=MAX_CATEGORIES, feature=None):
    """Stack candidate (label 0) and corpus (label 1) distributions of one feature.

    The vocabulary is built from both groups together.
    """
    dists = list(candidates) + list(corpus)
    vocab = build_vocabulary(dists, cap=cap, feature=feature)
    rows = np.array([vectorize(d, vocab) for d in dists]).reshape(len(dists), len(vocab))
    labels = np.array([0] * len(candidates) + [1] * len(corpus))
    empty = tuple(i for i, d in enumerate(dists) if sum(d.values()) <= 0)
    return FeatureMatrix(vocab, rows, labels, empty)


# ---------------------------------------------------------------------------
# Serialization


def _plain(w):
    return int(w) if float(w).is_integer() else float(w)


def dump_distributions(dists):
    """JSON text ``{feature: {category-as-decimal-string: weight}}``."""
    return json.dumps(
        {
            name: {str(c): _plain(w) for c, w in sorted(d.items())}
            for name, d in dists.items()
        },
        indent=1,
    )


def load_distributions(text):
    data = json.loads(text)
    return {name: Counter({int(c): w for c, w in d.items()}) for name, d in data.items()}


def matrix_to_csv(matrix, row_ids=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rowId", "label"] + [str(c) for c in matrix.vocabulary.kept])
    ids = row_ids if row_ids is not None else range(len(matrix.rows))
    for rid, label, row in zip(ids, matrix.labels, matrix.rows):
        writer.writerow([rid, int(label)] + [repr(float(v)) for v in row])
    return buf.getvalue()
