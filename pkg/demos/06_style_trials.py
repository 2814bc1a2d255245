"""
Style separation trials
=======================

Repeatedly draw a corpus and two candidate groups, one from the corpus style
and one from another style, and test whether the first group scores higher.
Raw-distance baselines see the same vectors.
"""

from stylerank.experiments import run_experiment1
from stylerank.features import extract_from_notes
from stylerank.forest import ForestConfig
from stylerank.synthetic import STYLE_A, STYLE_B, generate_corpus

pool_a = [extract_from_notes(p) for p in generate_corpus(STYLE_A, 60, seed=0)]
pool_b = [extract_from_notes(p) for p in generate_corpus(STYLE_B, 30, seed=1)]

result = run_experiment1(pool_a, pool_b, sizes=[10], trials=10,
                         config=ForestConfig(tree_count=100), seed=0)
print(result.summary_csv())

# when both groups come from the same style there is nothing to find
null = run_experiment1(pool_a[:40], pool_a[40:], sizes=[10], trials=10,
                       config=ForestConfig(tree_count=100), seed=0, baselines=())
print(null.summary_csv())
