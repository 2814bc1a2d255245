"""
Agreement with listener judgments
=================================

Given how often listeners mistook each generated piece for a real one,
count how many significantly different pairs the scores order the same way.
"""

import numpy as np

from stylerank.experiments import run_experiment2
from stylerank.stats import chi_square_2x2, ranking_accuracy

rng = np.random.default_rng(0)
ids = [f"s{i}" for i in range(12)]
miss = rng.integers(5, 60, len(ids))
counts = {g: (int(m), int(80 - m)) for g, m in zip(ids, miss)}

print(chi_square_2x2(counts["s0"], counts["s1"]))

# scores that follow the miss rate, with a little noise
scores = {g: counts[g][0] + rng.normal(0, 5) for g in ids}
for alpha in (5.0, 0.05):
    print(alpha, ranking_accuracy(scores, counts, alpha))

table = run_experiment2([scores], counts, random_trials=10)
print(table.to_csv())
