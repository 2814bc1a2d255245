"""Style scores from forest embeddings."""

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "cosine",
    "one_hot",
    "leaf_agreement",
    "style_score",
    "ScoreReport",
    "per_feature_scores",
]


def cosine(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("cosine of vectors with different shapes")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine of a zero vector")
    return float(a @ b / (na * nb))


def one_hot(leaves, leaf_counts):
    """Concatenated one-hot form of a per-tree leaf assignment."""
    leaves = np.asarray(leaves)
    offsets = np.concatenate([[0], np.cumsum(leaf_counts)[:-1]])
    v = np.zeros(int(np.sum(leaf_counts)))
    v[offsets + leaves] = 1.0
    return v


def leaf_agreement(A, B):
    """Fraction of trees where rows of ``A`` and ``B`` share a leaf.

    ``A`` is ``(m, T)`` and ``B`` is ``(n, T)``; the result is ``(m, n)``.
    This equals the cosine of the one-hot embeddings.
    """
    A = np.atleast_2d(A)
    B = np.atleast_2d(B)
    return (A[:, None, :] == B[None, :, :]).mean(axis=2)


def style_score(candidate, corpus):
    """Mean embedding similarity of one candidate to every corpus file.

    ``candidate`` maps feature name to the candidate's leaf vector and
    ``corpus`` maps feature name to a ``(n_corpus, T)`` array of corpus leaf
    vectors for the same forest.
    """
    if not candidate:
        raise ValueError("empty feature set")
    per_feature = []
    for name, leaves in candidate.items():
        C = np.atleast_2d(corpus[name])
        if len(C) == 0:
            raise ValueError("empty corpus")
        per_feature.append(leaf_agreement(leaves, C).mean())
    return float(np.mean(per_feature))


@dataclass
class ScoreReport:
    candidate_ids: list
    features: list
    per_feature: np.ndarray  # (n_candidates, n_features)
    metadata: dict = field(default_factory=dict)

    @property
    def global_scores(self):
        return self.per_feature.mean(axis=1)

    @property
    def per_candidate(self):
        return dict(zip(self.candidate_ids, self.global_scores.tolist()))

    @property
    def ranking(self):
        g = self.global_scores
        order = sorted(range(len(g)), key=lambda i: (-g[i], self.candidate_ids[i]))
        return [self.candidate_ids[i] for i in order]

    def feature_score(self, candidate_id, feature):
        i = self.candidate_ids.index(candidate_id)
        return float(self.per_feature[i, self.features.index(feature)])

    def to_dict(self):
        scores = self.per_candidate
        rows = {cid: i for i, cid in enumerate(self.candidate_ids)}
        return {
            "features": list(self.features),
            "ranking": [
                {
                    "candidateId": cid,
                    "globalScore": scores[cid],
                    "perFeature": dict(zip(self.features, self.per_feature[rows[cid]].tolist())),
                }
                for cid in self.ranking
            ],
            "metadata": self.metadata,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["candidateId", "globalScore"] + list(self.features))
        rows = {cid: i for i, cid in enumerate(self.candidate_ids)}
        g = self.global_scores
        for cid in self.ranking:
            i = rows[cid]
            writer.writerow([cid, repr(float(g[i]))] + [repr(float(v)) for v in self.per_feature[i]])
        return buf.getvalue()

    @classmethod
    def from_dict(cls, data):
        ids = [r["candidateId"] for r in data["ranking"]]
        features = data["features"]
        per = np.array([[r["perFeature"][f] for f in features] for r in data["ranking"]])
        return cls(ids, features, per.reshape(len(ids), len(features)), data.get("metadata", {}))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        features = rows[0][2:]
        ids = [r[0] for r in rows[1:]]
        per = np.array([[float(v) for v in r[2:]] for r in rows[1:]])
        return cls(ids, features, per.reshape(len(ids), len(features)))


def per_feature_scores(candidate_leaves, corpus_leaves, candidate_ids=None):
    """Score every candidate against the corpus, feature by feature.

    Both arguments map feature name to a leaf array (rows = files).
    """
    features = list(candidate_leaves)
    if not features:
        raise ValueError("empty feature set")
    n = len(np.atleast_2d(candidate_leaves[features[0]]))
    ids = list(candidate_ids) if candidate_ids is not None else [str(i) for i in range(n)]
    per = np.empty((n, len(features)))
    for j, name in enumerate(features):
        C = np.atleast_2d(corpus_leaves[name])
        if len(C) == 0:
            raise ValueError("empty corpus")
        per[:, j] = leaf_agreement(candidate_leaves[name], C).mean(axis=1)
    return ScoreReport(ids, features, per)
