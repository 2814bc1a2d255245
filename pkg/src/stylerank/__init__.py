"""Rank symbolic music by stylistic similarity to a corpus.

Files are reduced to chord sequences, each feature turns a file into a
categorical distribution, and a per-feature random forest trained to tell
candidates from corpus files embeds every file by its leaf assignments.  A
candidate's style score is its mean embedding similarity to the corpus.

>>> from stylerank import Note, segment_chords, extract_features
>>> chords = segment_chords([Note(0, 480, 60), Note(0, 480, 64), Note(0, 480, 67)])
>>> dict(extract_features(chords, ["ChordPCD"])["ChordPCD"])
{145: 480}
"""

from .corpus import dedup, levenshtein, levenshtein_norm, make_trial_split, pitch_signature
from .features import (
    CATALOG,
    FEATURE_NAMES,
    MAX_CATEGORIES,
    build_feature_matrix,
    build_vocabulary,
    extract_features,
    extract_from_notes,
    vectorize,
)
from .forest import ForestConfig, RandomForest, embed, fit_forest
from .midi import (
    ChordEvent,
    MidiParseError,
    Note,
    extract_melody,
    load_notes,
    parse_midi,
    segment_chords,
    write_midi,
)
from .pipeline import extract_files, raw_distance_scores, score
from .similarity import ScoreReport, cosine, leaf_agreement, style_score
from .stats import (
    benjamini_yekutieli,
    bonferroni,
    chi_square_2x2,
    mann_whitney_one_sided,
    ranking_accuracy,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "FEATURE_NAMES",
    "MAX_CATEGORIES",
    "ChordEvent",
    "ForestConfig",
    "MidiParseError",
    "Note",
    "RandomForest",
    "ScoreReport",
    "benjamini_yekutieli",
    "bonferroni",
    "build_feature_matrix",
    "build_vocabulary",
    "chi_square_2x2",
    "cosine",
    "dedup",
    "embed",
    "extract_features",
    "extract_files",
    "extract_from_notes",
    "extract_melody",
    "fit_forest",
    "leaf_agreement",
    "levenshtein",
    "levenshtein_norm",
    "load_notes",
    "make_trial_split",
    "mann_whitney_one_sided",
    "parse_midi",
    "pitch_signature",
    "ranking_accuracy",
    "raw_distance_scores",
    "score",
    "segment_chords",
    "style_score",
    "vectorize",
    "write_midi",
]
