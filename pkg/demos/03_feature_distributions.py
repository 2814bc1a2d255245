"""
Feature distributions
=====================

Each of the 31 features turns a piece into counts over integer categories.
Across files, the most widespread categories form a vocabulary and every
file becomes a frequency vector.
"""

from stylerank.features import FEATURE_NAMES, build_vocabulary, extract_from_notes, vectorize
from stylerank.synthetic import STYLE_A, STYLE_B, generate_corpus

print(len(FEATURE_NAMES), "features")

a = generate_corpus(STYLE_A, 3, seed=0)
b = generate_corpus(STYLE_B, 3, seed=1)
dists = [extract_from_notes(p, ["ChordPCD", "ChordDuration"]) for p in a + b]

pcds = [d["ChordPCD"] for d in dists]
print("first file, ChordPCD:", dict(pcds[0].most_common(4)))

vocab = build_vocabulary(pcds, cap=6)
print("vocabulary:", vocab.kept)
for d in pcds:
    print(vectorize(d, vocab).round(3))

# style B occasionally uses dotted quarters (720 ticks)
for d in dists:
    print(sorted(d["ChordDuration"]))
