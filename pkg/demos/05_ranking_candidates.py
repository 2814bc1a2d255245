"""
Ranking candidates against a corpus
===================================

The full pipeline: one forest per feature, candidates scored by their mean
leaf agreement with the corpus, averaged over features.
"""

from stylerank.features import extract_from_notes
from stylerank.forest import ForestConfig
from stylerank.pipeline import score
from stylerank.synthetic import STYLE_A, STYLE_B, StyleProcess, generate_corpus

distant = StyleProcess(
    name="distant",
    qualities=((0, 5, 10), (0, 1, 6)),
    quality_weights=(0.5, 0.5),
    durations=(240, 120),
    duration_weights=(0.5, 0.5),
)

corpus = [extract_from_notes(p) for p in generate_corpus(STYLE_A, 20, seed=0)]
candidates, ids = [], []
for process, seed in ((STYLE_A, 1), (STYLE_B, 2), (distant, 3)):
    for i, p in enumerate(generate_corpus(process, 3, seed)):
        candidates.append(extract_from_notes(p))
        ids.append(f"{process.name}{i}")

report = score(candidates, corpus, config=ForestConfig(tree_count=100), candidate_ids=ids)
for cid in report.ranking:
    print(f"{cid:10s} {report.per_candidate[cid]:.3f}")

# the strongest and weakest features for one candidate
cols = sorted(zip(report.per_feature[0].round(3).tolist(), report.features))
print("weakest:", cols[:3])
print("strongest:", cols[-3:])
