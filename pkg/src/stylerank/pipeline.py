"""End-to-end scoring: distributions -> per-feature forests -> style scores."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .features import FEATURE_NAMES, build_feature_matrix, extract_from_notes
from .forest import ForestConfig, fit_forest
from .midi import load_notes
from .similarity import per_feature_scores

__all__ = [
    "feature_seed",
    "extract_files",
    "embed_feature",
    "score",
    "raw_distance_scores",
    "RAW_METRICS",
]


def feature_seed(seed, feature_index):
    """Independent forest seed for one feature of a run."""
    ss = np.random.SeedSequence(seed, spawn_key=(1_000_003, feature_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _extract_one(args):
    path, features, load_kwargs = args
    try:
        notes = load_notes(path, **load_kwargs)
        if not notes:
            raise ValueError("file contains no notes")
        return extract_from_notes(notes, features), None
    except Exception as exc:  # per-file isolation
        return None, f"{type(exc).__name__}: {exc}"


def extract_files(paths, features=None, workers=1, **load_kwargs):
    """Extract distributions for many files; returns ``(results, errors)``.

    ``results`` maps path to ``{feature: Counter}``; ``errors`` maps path to
    a message for files that could not be read or parsed.
    """
    jobs = [(p, features, load_kwargs) for p in paths]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            out = list(pool.map(_extract_one, jobs))
    else:
        out = [_extract_one(j) for j in jobs]
    results, errors = {}, {}
    for p, (dist, err) in zip(paths, out):
        if err is None:
            results[p] = dist
        else:
            errors[p] = err
    return results, errors


def embed_feature(name, candidates, corpus, config):
    """Fit one forest for ``name`` and return (candidate leaves, corpus leaves, matrix)."""
    matrix = build_feature_matrix(
        [c[name] for c in candidates], [c[name] for c in corpus], feature=name
    )
    rows = matrix.rows
    if rows.shape[1] == 0:
        rows = np.zeros((len(rows), 1))
    forest = fit_forest(rows, matrix.labels, config)
    leaves = forest.apply(rows)
    m = len(candidates)
    return leaves[:m], leaves[m:], matrix


def _embed_job(args):
    name, index, candidates, corpus, config = args
    cfg = replace(config, seed=feature_seed(config.seed, index))
    cand, corp, matrix = embed_feature(name, candidates, corpus, cfg)
    return name, cand, corp, matrix.empty_rows


def score(candidates, corpus, features=None, config=ForestConfig(), candidate_ids=None,
          workers=1):
    """Style scores of ``candidates`` against ``corpus``.

    Both arguments are lists of ``{feature: Counter}`` dictionaries.  Returns
    a :class:`~stylerank.similarity.ScoreReport` with one column per feature.
    """
    candidates = list(candidates)
    corpus = list(corpus)
    if not corpus:
        raise ValueError("empty corpus")
    if not candidates:
        raise ValueError("no candidates")
    names = list(features) if features is not None else list(FEATURE_NAMES)
    if not names:
        raise ValueError("empty feature set")
    # seeds follow catalog position so a feature's forest does not depend on
    # which other features were selected
    jobs = [
        (n, FEATURE_NAMES.index(n) if n in FEATURE_NAMES else i, candidates, corpus, config)
        for i, n in enumerate(names)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            done = list(pool.map(_embed_job, jobs))
    else:
        done = [_embed_job(j) for j in jobs]
    cand_leaves = {n: c for n, c, _, _ in done}
    corp_leaves = {n: c for n, _, c, _ in done}
    report = per_feature_scores(cand_leaves, corp_leaves, candidate_ids)
    m = len(candidates)
    empty = {n: [i for i in e if i < m] for n, _, _, e in done}
    report.metadata["emptyDistributions"] = {
        n: [report.candidate_ids[i] for i in rows] for n, rows in empty.items() if rows
    }
    return report


def _cosine_distance(a, b):
    na = np.linalg.norm(a, axis=-1)
    nb = np.linalg.norm(b, axis=-1)
    denom = na[:, None] * nb[None, :]
    dots = a @ b.T
    with np.errstate(invalid="ignore", divide="ignore"):
        sim = np.where(denom > 0, dots / np.where(denom > 0, denom, 1.0), 0.0)
    return 1.0 - sim


def _manhattan(a, b):
    return np.abs(a[:, None, :] - b[None, :, :]).sum(axis=2)


def _euclidean(a, b):
    return np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))


RAW_METRICS = {"cosine": _cosine_distance, "manhattan": _manhattan, "euclidean": _euclidean}


def raw_distance_scores(candidates, corpus, features=None, metric="cosine"):
    """Mean of ``1 - distance`` between frequency vectors, over corpus and features.

    Vectors come from the same capped vocabularies the forests consume.
    """
    dist_fn = RAW_METRICS[metric]
    names = list(features) if features is not None else list(FEATURE_NAMES)
    m = len(candidates)
    total = np.zeros(m)
    for name in names:
        matrix = build_feature_matrix(
            [c[name] for c in candidates], [c[name] for c in corpus], feature=name
        )
        rows = matrix.rows
        if rows.shape[1] == 0:
            rows = np.zeros((len(rows), 1))
        total += (1.0 - dist_fn(rows[:m], rows[m:])).mean(axis=1)
    return total / len(names)
