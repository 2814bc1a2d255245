"""
Pitch-class sets as integers
============================

Chords become 12-bit integers, one bit per pitch class.  Rotating the bits
transposes the chord, and the smallest rotation names its transposition
class.
"""

from stylerank.pitch import pc_mask, pcd, rot, scale_signature, tonnetz_length

c_major = pc_mask([60, 64, 67])
print("C major as bits:", c_major, format(c_major, "012b"))

# up a major sixth (8 semitones) gives an A-flat major triad
print("transposed by 8:", rot(c_major, 12, 8))
print("class of both:", pcd(c_major), pcd(rot(c_major, 12, 8)))

# major and minor triads stay apart
print("C minor class:", pcd(pc_mask([60, 63, 67])))

# 4096 sets fall into 352 transposition classes
print("classes:", len({pcd(x) for x in range(4096)}))

# which of the 24 major / harmonic-minor scales contain C-E-G?
sig = scale_signature({0, 4, 7})
print("scales containing C major:", bin(sig).count("1"))

# shortest walk through the chord tones on the Tonnetz
print("tonnetz length of C major:", tonnetz_length({0, 4, 7}))
print("tonnetz length of a cluster:", tonnetz_length({0, 1, 2}))
