"""Pitch-class set algebra and the musical helpers used by the feature catalog.

Pitch-class sets are 12-bit integers (bit ``i`` set iff pitch class ``i`` is
present, C = 0).  Larger packed values (24-bit onset/tie concatenations,
scale signatures) use the same bit conventions.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import gcd

import numpy as np

__all__ = [
    "rot",
    "reduce",
    "pcd",
    "pc",
    "pcc",
    "popcount",
    "pc_mask",
    "scale_signature",
    "MAJOR_SCALE",
    "HARMONIC_MINOR_SCALE",
    "JUST_RATIOS",
    "stol_periodicity",
    "dissonance",
    "tonnetz_distances",
    "tonnetz_length",
    "tonnetz_length_bruteforce",
    "voice_motion",
    "STATIC",
    "OBLIQUE",
    "CONTRARY",
    "SIMILAR",
    "PARALLEL",
]


def rot(x, n, i):
    """Circular left rotation of the low ``n`` bits of ``x`` by ``i``."""
    if x < 0 or x >= 1 << n:
        raise ValueError(f"{x} does not fit in {n} bits")
    if not 0 <= i < n:
        raise ValueError(f"rotation {i} outside [0, {n})")
    return ((x << i) | (x >> (n - i))) & ((1 << n) - 1)


def reduce(x, n):
    """Smallest value among all ``n`` rotations of ``x``."""
    if x < 0 or x >= 1 << n:
        raise ValueError(f"{x} does not fit in {n} bits")
    mask = (1 << n) - 1
    best = x
    for i in range(1, n):
        r = ((x << i) | (x >> (n - i))) & mask
        if r < best:
            best = r
    return best


_PCD_TABLE = tuple(reduce(x, 12) for x in range(4096))


def pcd(x):
    """Transposition class representative of a 12-bit pitch-class set."""
    if x < 0 or x >= 4096:
        raise ValueError(f"{x} is not a 12-bit pitch-class set")
    return _PCD_TABLE[x]


def pc(x):
    return x % 12


def pcc(x):
    return abs(x % 12 - 6)


def popcount(x):
    return int(x).bit_count()


def pc_mask(pitches):
    """12-bit pitch-class set of an iterable of MIDI pitches."""
    m = 0
    for p in pitches:
        m |= 1 << (p % 12)
    return m


MAJOR_SCALE = frozenset({0, 2, 4, 5, 7, 9, 11})
HARMONIC_MINOR_SCALE = frozenset({0, 2, 3, 5, 7, 8, 11})


def _transposed_masks(scale):
    return [pc_mask((s + i) % 12 for s in scale) for i in range(1, 13)]


_MAJOR_MASKS = _transposed_masks(MAJOR_SCALE)
_HMINOR_MASKS = _transposed_masks(HARMONIC_MINOR_SCALE)


@lru_cache(maxsize=4096)
def _scale_signature_of_mask(mask):
    sig = 0
    for i in range(1, 13):
        if mask & ~_MAJOR_MASKS[i - 1] == 0:
            sig |= 1 << i
        if mask & ~_HMINOR_MASKS[i - 1] == 0:
            sig |= 1 << (12 + i)
    return sig


def scale_signature(pcs):
    """Set of major / harmonic-minor transpositions containing ``pcs``.

    Bit ``i`` (1..12) is set when every pitch class lies in the major scale
    transposed up ``i`` semitones, bit ``12 + i`` likewise for harmonic minor.
    ``pcs`` is an iterable of pitch classes (values are taken mod 12).
    """
    return _scale_signature_of_mask(pc_mask(pcs))


# Just-intonation approximations of the 12 equal-tempered intervals.
JUST_RATIOS = (
    Fraction(1, 1),
    Fraction(16, 15),
    Fraction(9, 8),
    Fraction(6, 5),
    Fraction(5, 4),
    Fraction(4, 3),
    Fraction(17, 12),
    Fraction(3, 2),
    Fraction(8, 5),
    Fraction(5, 3),
    Fraction(16, 9),
    Fraction(15, 8),
)


def _interval_ratio(s):
    octave, step = divmod(s, 12)
    r = JUST_RATIOS[step]
    return r * 2**octave if octave >= 0 else r / 2 ** (-octave)


def stol_periodicity(relative_pitches):
    """Relative periodicity of a set of intervals (in semitones).

    Each interval is mapped to its just ratio, and the least common multiple
    of the reduced denominators is returned.
    """
    rel = set(relative_pitches)
    if not rel:
        raise ValueError("periodicity of an empty set")
    return _stol(frozenset(rel))


@lru_cache(maxsize=65536)
def _stol(rel):
    out = 1
    for s in rel:
        d = _interval_ratio(s).denominator
        out = out * d // gcd(out, d)
    return out


def dissonance(P, T):
    """Mean periodicity of ``P`` measured relative to every pitch in ``T``.

    Returned as an exact :class:`fractions.Fraction`.
    """
    P = frozenset(P)
    T = frozenset(T)
    if not T:
        raise ValueError("dissonance reference set is empty")
    if not P:
        raise ValueError("dissonance pitch set is empty")
    total = sum(_stol(frozenset(p - x for p in P)) for x in T)
    return Fraction(total, len(T))


_TONNETZ_STEPS = frozenset({3, 4, 5, 7, 8, 9})


def _tonnetz_distance_matrix():
    adj = np.array(
        [[(j - i) % 12 in _TONNETZ_STEPS for j in range(12)] for i in range(12)]
    )
    dist = np.full((12, 12), 99, dtype=np.int64)
    for src in range(12):
        dist[src, src] = 0
        frontier = [src]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.flatnonzero(adj[u]):
                    if dist[src, v] > dist[src, u] + 1:
                        dist[src, v] = dist[src, u] + 1
                        nxt.append(int(v))
            frontier = nxt
    dist.setflags(write=False)
    return dist


_TONNETZ_DIST = _tonnetz_distance_matrix()


def tonnetz_distances():
    """Read-only 12x12 matrix of shortest Tonnetz path lengths."""
    return _TONNETZ_DIST


def _mask_of(pcs):
    mask = 0
    for p in pcs:
        mask |= 1 << (p % 12)
    return mask


def tonnetz_length(pcs):
    """Fewest Tonnetz edges in a walk visiting every pitch class of ``pcs``."""
    mask = _mask_of(pcs)
    if mask == 0:
        raise ValueError("tonnetz_length of an empty set")
    return _tonnetz_length_mask(mask)


@lru_cache(maxsize=4096)
def _tonnetz_length_mask(mask):
    nodes = [i for i in range(12) if mask >> i & 1]
    k = len(nodes)
    if k == 1:
        return 0
    d = [[int(_TONNETZ_DIST[a, b]) for b in nodes] for a in nodes]
    INF = 1 << 30
    full = (1 << k) - 1
    # best[S][j]: shortest walk covering subset S and ending at node j
    best = [[INF] * k for _ in range(1 << k)]
    for j in range(k):
        best[1 << j][j] = 0
    for S in range(1, full + 1):
        row = best[S]
        for j in range(k):
            cost = row[j]
            if cost == INF:
                continue
            dj = d[j]
            for nxt in range(k):
                if S >> nxt & 1:
                    continue
                T = S | 1 << nxt
                c = cost + dj[nxt]
                if c < best[T][nxt]:
                    best[T][nxt] = c
    return min(best[full])


def tonnetz_length_bruteforce(pcs):
    """Exhaustive-permutation reference for :func:`tonnetz_length`."""
    nodes = sorted({p % 12 for p in pcs})
    if not nodes:
        raise ValueError("tonnetz_length of an empty set")
    return min(
        sum(int(_TONNETZ_DIST[a, b]) for a, b in zip(order, order[1:]))
        for order in permutations(nodes)
    )


STATIC, OBLIQUE, CONTRARY, SIMILAR, PARALLEL = range(5)


def _sign(v):
    return (v > 0) - (v < 0)


def voice_motion(P1, P2):
    """Classify the outer-voice motion between two successive pitch sets."""
    if not P1 or not P2:
        raise ValueError("voice_motion needs two non-empty pitch sets")
    low = min(P2) - min(P1)
    high = max(P2) - max(P1)
    s_low, s_high = _sign(low), _sign(high)
    if s_low == 0 and s_high == 0:
        return STATIC
    if s_low == 0 or s_high == 0:
        return OBLIQUE
    if s_low != s_high:
        return CONTRARY
    if abs(low) == abs(high):
        return PARALLEL
    return SIMILAR
