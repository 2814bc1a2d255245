"""
Forest embeddings
=================

A random forest trained to separate two groups maps each vector to the leaf
it reaches in every tree.  The share of trees in which two vectors land in
the same leaf is their similarity, and equals the cosine of the one-hot
leaf vectors.
"""

import numpy as np

from stylerank.forest import ForestConfig, fit_forest
from stylerank.similarity import cosine, leaf_agreement, one_hot

rng = np.random.default_rng(0)
X = np.vstack([rng.normal(0, 1, (20, 4)), rng.normal(1, 1, (20, 4))])
y = np.array([0] * 20 + [1] * 20)

forest = fit_forest(X, y, ForestConfig(tree_count=100, seed=1))
leaves = forest.apply(X)
print("embedding shape:", leaves.shape)
print("leaves per tree:", forest.leaf_counts[:10])

S = leaf_agreement(leaves, leaves)
print("within group 0:", S[:20, :20].mean().round(3))
print("across groups:", S[:20, 20:].mean().round(3))

a = one_hot(leaves[0], forest.leaf_counts)
b = one_hot(leaves[1], forest.leaf_counts)
print(cosine(a, b), S[0, 1])
