"""Random forests grown to tell candidates from a corpus, used as embeddings.

Each tree is a depth-limited binary classifier trained with entropy gain on
a bootstrap resample, with classes reweighted to equal total mass.  A file is
embedded as the leaf it reaches in every tree; two embeddings are compared
by the fraction of trees in which they share a leaf.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

__all__ = [
    "ForestConfig",
    "DecisionTree",
    "RandomForest",
    "fit_forest",
    "embed",
    "FOREST_FORMAT_VERSION",
]

FOREST_FORMAT_VERSION = 1
_GAIN_TOL = 1e-12


@dataclass(frozen=True)
class ForestConfig:
    tree_count: int = 500
    max_depth: int = 5
    split_criterion: str = "entropy"
    class_weighting: str = "balanced"
    features_per_split: int = None  # None -> ceil(sqrt(d))
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.tree_count < 1:
            raise ValueError("tree_count must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.split_criterion != "entropy":
            raise ValueError("only the entropy criterion is supported")
        if self.class_weighting not in ("balanced", "none"):
            raise ValueError("class_weighting must be 'balanced' or 'none'")

    def split_width(self, d):
        if self.features_per_split is not None:
            return max(1, min(d, self.features_per_split))
        return max(1, math.ceil(math.sqrt(d)))


@dataclass
class DecisionTree:
    """Array-backed binary tree.  Node 0 is the root.

    Internal nodes have ``leaf[i] == -1``; leaves carry a dense leaf id.
    ``mass`` holds the weighted (class 0, class 1) training mass per node.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    leaf: np.ndarray
    mass: np.ndarray
    depth: int

    @property
    def n_leaves(self):
        return int((self.leaf >= 0).sum())

    def apply(self, X):
        X = np.atleast_2d(X)
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        for _ in range(self.depth):
            f = self.feature[node]
            inner = self.leaf[node] < 0
            go_left = X[rows, np.where(inner, f, 0)] <= self.threshold[node]
            node = np.where(inner, np.where(go_left, self.left[node], self.right[node]), node)
        return self.leaf[node]

    def node_depths(self):
        depth = np.zeros(len(self.feature), dtype=np.int64)
        for i in range(len(self.feature)):
            if self.leaf[i] < 0:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return depth


@njit(cache=True)
def _next(state):
    # splitmix64; state is a 1-element uint64 array
    state[0] += np.uint64(0x9E3779B97F4A7C15)
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def _randbelow(state, n):
    return np.int64(_next(state) % np.uint64(n))


@njit(cache=True)
def _xlog2x(a):
    if a <= 0.0:
        return 0.0
    return a * np.log2(a)


@njit(cache=True)
def _grow_tree(X, y, cw0, cw1, seed, max_depth, k, bootstrap,
               feature, threshold, left, right, leaf, mass, train_leaf):
    """Grow one tree into preallocated node arrays; returns (n_nodes, depth)."""
    n, d = X.shape
    state = np.empty(1, dtype=np.uint64)
    state[0] = seed
    counts = np.zeros(n)
    if bootstrap:
        for _ in range(n):
            counts[_randbelow(state, n)] += 1.0
    else:
        counts[:] = 1.0
    w0 = np.zeros(n)
    w1 = np.zeros(n)
    for r in range(n):
        if y[r] == 0:
            w0[r] = counts[r] * cw0
        else:
            w1[r] = counts[r] * cw1

    idx = np.empty(n, dtype=np.int64)
    m = 0
    for r in range(n):
        if counts[r] > 0:
            idx[m] = r
            m += 1

    max_nodes = feature.shape[0]
    st_node = np.empty(max_nodes, dtype=np.int64)
    st_lo = np.empty(max_nodes, dtype=np.int64)
    st_hi = np.empty(max_nodes, dtype=np.int64)
    st_depth = np.empty(max_nodes, dtype=np.int64)
    perm = np.empty(d, dtype=np.int64)
    chosen = np.empty(k, dtype=np.int64)
    vals = np.empty(n)
    a0 = np.empty(n)
    a1 = np.empty(n)

    feature[0] = -1
    left[0] = -1
    right[0] = -1
    leaf[0] = -1
    threshold[0] = 0.0
    t0 = 0.0
    t1 = 0.0
    for j in range(m):
        t0 += w0[idx[j]]
        t1 += w1[idx[j]]
    mass[0, 0] = t0
    mass[0, 1] = t1
    n_nodes = 1
    top = 0
    st_node[0] = 0
    st_lo[0] = 0
    st_hi[0] = m
    st_depth[0] = 0
    n_leaves = 0
    deepest = 0

    while top >= 0:
        node = st_node[top]
        lo = st_lo[top]
        hi = st_hi[top]
        depth = st_depth[top]
        top -= 1
        if depth > deepest:
            deepest = depth
        m0 = mass[node, 0]
        m1 = mass[node, 1]
        draws = 0.0
        for j in range(lo, hi):
            draws += counts[idx[j]]
        best_f = -1
        best_thr = 0.0
        if depth < max_depth and m0 > 0 and m1 > 0 and draws >= 2:
            for f in range(d):
                perm[f] = f
            for f in range(d - 1, 0, -1):
                g = _randbelow(state, f + 1)
                tmp = perm[f]
                perm[f] = perm[g]
                perm[g] = tmp
            nc = 0
            for q in range(d):
                f = perm[q]
                vmin = X[idx[lo], f]
                vmax = vmin
                for j in range(lo + 1, hi):
                    v = X[idx[j], f]
                    if v < vmin:
                        vmin = v
                    elif v > vmax:
                        vmax = v
                if vmax > vmin:
                    chosen[nc] = f
                    nc += 1
                    if nc == k:
                        break
            cs = np.sort(chosen[:nc])
            total = m0 + m1
            best_gain = -np.inf
            cnt = hi - lo
            for q in range(nc):
                f = cs[q]
                for j in range(cnt):
                    vals[j] = X[idx[lo + j], f]
                order = np.argsort(vals[:cnt], kind="mergesort")
                for j in range(cnt):
                    r = idx[lo + order[j]]
                    a0[j] = w0[r]
                    a1[j] = w1[r]
                l0 = 0.0
                l1 = 0.0
                for j in range(cnt - 1):
                    l0 += a0[j]
                    l1 += a1[j]
                    v_here = vals[order[j]]
                    v_next = vals[order[j + 1]]
                    if not v_next > v_here:
                        continue
                    r0 = m0 - l0
                    r1 = m1 - l1
                    child = (_xlog2x(l0 + l1) - _xlog2x(l0) - _xlog2x(l1)
                             + _xlog2x(r0 + r1) - _xlog2x(r0) - _xlog2x(r1))
                    gain = -child / total
                    if gain > best_gain + 1e-12:
                        best_gain = gain
                        best_f = f
                        thr = (v_here + v_next) / 2.0
                        if not (v_here <= thr and thr < v_next):
                            thr = v_here
                        best_thr = thr
        if best_f < 0:
            leaf[node] = n_leaves
            for j in range(lo, hi):
                train_leaf[idx[j]] = n_leaves
            n_leaves += 1
            continue
        # partition idx[lo:hi] into <= threshold (left) and > threshold (right)
        i = lo
        j = hi - 1
        while i <= j:
            if X[idx[i], best_f] <= best_thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i
        feature[node] = best_f
        threshold[node] = best_thr
        ln = n_nodes
        rn = n_nodes + 1
        n_nodes += 2
        left[node] = ln
        right[node] = rn
        for c in (ln, rn):
            feature[c] = -1
            left[c] = -1
            right[c] = -1
            leaf[c] = -1
            threshold[c] = 0.0
        s0 = 0.0
        s1 = 0.0
        for q in range(lo, mid):
            s0 += w0[idx[q]]
            s1 += w1[idx[q]]
        mass[ln, 0] = s0
        mass[ln, 1] = s1
        mass[rn, 0] = m0 - s0
        mass[rn, 1] = m1 - s1
        top += 1
        st_node[top] = rn
        st_lo[top] = mid
        st_hi[top] = hi
        st_depth[top] = depth + 1
        top += 1
        st_node[top] = ln
        st_lo[top] = lo
        st_hi[top] = mid
        st_depth[top] = depth + 1
    return n_nodes, deepest


def _tree_seed(seed, tree_index):
    ss = np.random.SeedSequence(seed, spawn_key=(tree_index,))
    return ss.generate_state(1, dtype=np.uint64)[0]


class RandomForest:
    """A fitted forest; use :func:`fit_forest` to build one."""

    def __init__(self, trees, n_features, config):
        self.trees = list(trees)
        self.n_features = n_features
        self.config = config
        self.training_leaves = None
        self._pack()

    def _pack(self):
        width = max(len(t.feature) for t in self.trees)
        T = len(self.trees)
        self._feature = np.zeros((T, width), dtype=np.int64)
        self._threshold = np.zeros((T, width))
        self._left = np.zeros((T, width), dtype=np.int64)
        self._right = np.zeros((T, width), dtype=np.int64)
        self._leaf = np.zeros((T, width), dtype=np.int64)
        for i, t in enumerate(self.trees):
            m = len(t.feature)
            self._feature[i, :m] = np.maximum(t.feature, 0)
            self._threshold[i, :m] = t.threshold
            self._left[i, :m] = t.left
            self._right[i, :m] = t.right
            self._leaf[i, :m] = t.leaf
        self._depth = max(t.depth for t in self.trees)

    @property
    def leaf_counts(self):
        return np.array([t.n_leaves for t in self.trees])

    def apply(self, X):
        """Leaf ids, shape ``(n_samples, tree_count)``."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"expected vectors of length {self.n_features}, got {X.shape[1]}"
            )
        T = len(self.trees)
        tree_ix = np.arange(T)[:, None]
        node = np.zeros((T, len(X)), dtype=np.int64)
        for _ in range(self._depth):
            inner = self._leaf[tree_ix, node] < 0
            f = self._feature[tree_ix, node]
            vals = X[np.arange(len(X))[None, :], f]
            go_left = vals <= self._threshold[tree_ix, node]
            nxt = np.where(go_left, self._left[tree_ix, node], self._right[tree_ix, node])
            node = np.where(inner, nxt, node)
        return self._leaf[tree_ix, node].T

    def to_dict(self):
        return {
            "version": FOREST_FORMAT_VERSION,
            "config": asdict(self.config),
            "n_features": self.n_features,
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "leaf": t.leaf.tolist(),
                    "mass": t.mass.tolist(),
                    "depth": t.depth,
                }
                for t in self.trees
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        if data.get("version") != FOREST_FORMAT_VERSION:
            raise ValueError(f"unsupported forest format version {data.get('version')}")
        trees = [
            DecisionTree(
                np.array(t["feature"], dtype=np.int64),
                np.array(t["threshold"], dtype=float),
                np.array(t["left"], dtype=np.int64),
                np.array(t["right"], dtype=np.int64),
                np.array(t["leaf"], dtype=np.int64),
                np.array(t["mass"], dtype=float).reshape(-1, 2),
                t["depth"],
            )
            for t in data["trees"]
        ]
        return cls(trees, data["n_features"], ForestConfig(**data["config"]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def fit_forest(X, y=None, config=ForestConfig()):
    """Fit a forest separating label 0 (candidates) from label 1 (corpus).

    ``X`` may be a :class:`~stylerank.features.FeatureMatrix`, in which case
    its rows and labels are used.
    """
    if y is None:
        X, y = X.rows, X.labels
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one label per row")
    if X.shape[1] == 0:
        raise ValueError("X has no columns")
    n0, n1 = int((y == 0).sum()), int((y == 1).sum())
    if n0 == 0 or n1 == 0 or n0 + n1 != len(y):
        raise ValueError("degenerate labels: need rows of both class 0 and class 1")
    if config.class_weighting == "balanced":
        class_weight = (len(y) / (2.0 * n0), len(y) / (2.0 * n1))
    else:
        class_weight = (1.0, 1.0)
    n, d = X.shape
    k = config.split_width(d)
    max_nodes = 2 ** (config.max_depth + 1) - 1
    trees, assignments = [], []
    for i in range(config.tree_count):
        feature = np.empty(max_nodes, dtype=np.int64)
        threshold = np.empty(max_nodes)
        left = np.empty(max_nodes, dtype=np.int64)
        right = np.empty(max_nodes, dtype=np.int64)
        leaf = np.empty(max_nodes, dtype=np.int64)
        mass = np.empty((max_nodes, 2))
        train_leaf = np.full(n, -1, dtype=np.int64)
        count, depth = _grow_tree(
            X, y, class_weight[0], class_weight[1], _tree_seed(config.seed, i),
            config.max_depth, k, config.bootstrap,
            feature, threshold, left, right, leaf, mass, train_leaf,
        )
        trees.append(DecisionTree(
            feature[:count].copy(), threshold[:count].copy(), left[:count].copy(),
            right[:count].copy(), leaf[:count].copy(), mass[:count].copy(), int(depth),
        ))
        assignments.append({int(r): int(train_leaf[r]) for r in np.flatnonzero(train_leaf >= 0)})
    forest = RandomForest(trees, X.shape[1], config)
    forest.training_leaves = assignments
    return forest


def embed(forest, vector):
    """Per-tree leaf ids of one vector (or of each row of a 2-D array)."""
    vector = np.asarray(vector, dtype=float)
    if vector.ndim == 1:
        if len(vector) != forest.n_features:
            raise ValueError(
                f"expected a vector of length {forest.n_features}, got {len(vector)}"
            )
        return forest.apply(vector)[0]
    return forest.apply(vector)
