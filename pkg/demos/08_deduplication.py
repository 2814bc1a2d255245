"""
Near-duplicate removal
======================

Files whose opening or closing hundred pitches are close in edit distance
are treated as versions of one piece, and only the first is kept.
"""

from stylerank.corpus import dedup, levenshtein_norm, pitch_signature
from stylerank.midi import Note
from stylerank.synthetic import STYLE_A, generate_corpus

print(levenshtein_norm("kitten", "sitting"))

pieces = generate_corpus(STYLE_A, 4, seed=0)
# a copy of piece 0 with a few pitches nudged
edited = [Note(n.onset, n.duration, n.pitch + (i % 25 == 0)) for i, n in enumerate(pieces[0])]
pieces.append(edited)

result = dedup([pitch_signature(p) for p in pieces], threshold=0.75)
print("kept:", result.kept, "removed:", result.removed)
print(result.report_csv([f"piece{i}" for i in range(len(pieces))]))
