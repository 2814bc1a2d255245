from fractions import Fraction
from itertools import combinations
from math import gcd, lcm

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stylerank.pitch import (
    CONTRARY,
    OBLIQUE,
    PARALLEL,
    SIMILAR,
    STATIC,
    dissonance,
    pc,
    pc_mask,
    pcc,
    pcd,
    popcount,
    reduce,
    rot,
    scale_signature,
    stol_periodicity,
    tonnetz_length,
    tonnetz_length_bruteforce,
    voice_motion,
)


def set_to_int(pcs):
    return sum(1 << p for p in set(pcs))


def int_to_set(x):
    return {i for i in range(12) if x >> i & 1}


def reduce_oracle(x):
    # rotate the pitch-class set itself rather than the bits
    s = int_to_set(x)
    return min(set_to_int({(p + i) % 12 for p in s}) for i in range(12))


def test_rot_examples():
    assert rot(145, 12, 0) == 145
    assert rot(145, 12, 8) == set_to_int({8, 0, 3}) == 265


@given(st.integers(0, 4095), st.integers(0, 11))
def test_rot_group_property(x, i):
    y = x
    order = 12 // gcd(i, 12)
    for _ in range(order):
        y = rot(y, 12, i)
    assert y == x


def test_rot_domain_errors():
    with pytest.raises(ValueError):
        rot(4096, 12, 1)
    with pytest.raises(ValueError):
        rot(1, 12, 12)


def test_reduce_examples():
    assert reduce(145, 12) == reduce_oracle(145) == 145
    assert reduce(265, 12) == reduce_oracle(265) == 145
    assert reduce(0, 12) == 0


def test_reduce_matches_set_rotation_oracle_everywhere():
    assert all(reduce(x, 12) == reduce_oracle(x) for x in range(4096))


def test_pcd_major_minor_distinct():
    assert set_to_int({60 % 12, 64 % 12, 67 % 12}) == 145
    assert pcd(145) == 145
    assert pcd(137) == 137
    assert pcd(145) != pcd(137)


def test_pcd_cardinality():
    assert len({pcd(x) for x in range(4096)}) == 352


def test_pcd_single_pitch_class():
    assert {pcd(1 << k) for k in range(12)} == {1}


@given(st.integers(0, 4095), st.integers(0, 11))
def test_pcd_transposition_invariant(x, i):
    assert pcd(rot(x, 12, i)) == pcd(x)


@given(st.integers(0, 4095))
def test_pcd_idempotent_and_minimal(x):
    assert pcd(pcd(x)) == pcd(x)
    assert pcd(x) <= x


MAJOR = {0, 2, 4, 5, 7, 9, 11}
HMINOR = {0, 2, 3, 5, 7, 8, 11}


def scale_oracle(pcs):
    pcs = set(pcs)
    bits = set()
    for i in range(1, 13):
        if pcs <= {(s + i) % 12 for s in MAJOR}:
            bits.add(i)
        if pcs <= {(s + i) % 12 for s in HMINOR}:
            bits.add(12 + i)
    return bits


def test_scale_signature_examples():
    assert scale_signature(set()) == sum(1 << b for b in range(1, 25))
    assert popcount(scale_signature({0})) == len(scale_oracle({0})) == 14
    assert scale_signature(range(12)) == 0


@given(st.sets(st.integers(0, 11)))
def test_scale_signature_matches_oracle(pcs):
    sig = scale_signature(pcs)
    assert sig & 1 == 0
    assert {b for b in range(32) if sig >> b & 1} == scale_oracle(pcs)


@given(st.sets(st.integers(0, 11)), st.sets(st.integers(0, 11)))
def test_scale_signature_antitone(a, b):
    small, big = a, a | b
    assert scale_signature(big) & ~scale_signature(small) == 0


def test_pc_and_pcc():
    assert pc(-5) == 7
    assert pcc(6) == 0
    assert pcc(0) == 6
    assert pcc(7) == 1


def test_popcount():
    assert popcount(0) == 0
    assert popcount(145) == 3
    assert popcount(2**63) == 1


TABLE = [Fraction(*r) for r in [(1, 1), (16, 15), (9, 8), (6, 5), (5, 4), (4, 3),
                                (17, 12), (3, 2), (8, 5), (5, 3), (16, 9), (15, 8)]]


def stol_oracle(rel):
    dens = []
    for s in rel:
        r = TABLE[s % 12] * Fraction(2) ** (s // 12)
        dens.append(r.denominator)
    return lcm(*dens)


def test_stol_examples():
    assert stol_periodicity({0}) == 1
    assert stol_periodicity({0, 7}) == stol_oracle({0, 7}) == 2
    assert stol_periodicity({0, 12}) == 1


def test_just_ratios_near_equal_temperament():
    for k, r in enumerate(TABLE):
        assert abs(float(r) / 2 ** (k / 12) - 1) < 0.011


@given(st.sets(st.integers(-30, 30), min_size=1, max_size=6))
def test_stol_matches_oracle(rel):
    assert stol_periodicity(rel) == stol_oracle(rel)


def test_dissonance_examples():
    assert dissonance({60}, {60}) == 1
    expected = Fraction(stol_oracle({0, 7}) + stol_oracle({-7, 0}), 2)
    assert dissonance({60, 67}, {60, 67}) == expected == Fraction(5, 2)
    with pytest.raises(ValueError):
        dissonance({60}, set())


@given(st.sets(st.integers(30, 90), min_size=1, max_size=5))
def test_dissonance_octave_shift_invariant(P):
    shifted = {p + 12 for p in P}
    assert dissonance(P, P) == dissonance(shifted, shifted)


def test_tonnetz_examples():
    assert tonnetz_length({0}) == 0
    assert tonnetz_length({0, 4, 7}) == 2
    assert tonnetz_length({0, 1}) == 2
    with pytest.raises(ValueError):
        tonnetz_length(set())


def test_tonnetz_dp_matches_bruteforce_up_to_six():
    for k in range(1, 7):
        for pcs in combinations(range(12), k):
            assert tonnetz_length(pcs) == tonnetz_length_bruteforce(pcs), pcs


def test_voice_motion_examples():
    assert voice_motion({60, 67}, {60, 67}) == STATIC
    assert voice_motion({60, 67}, {62, 69}) == PARALLEL
    assert voice_motion({60, 67}, {58, 69}) == CONTRARY
    assert voice_motion({60, 67}, {60, 69}) == OBLIQUE
    assert voice_motion({60, 67}, {62, 72}) == SIMILAR


@given(st.sets(st.integers(0, 127), min_size=1, max_size=6))
def test_voice_motion_static_on_self(P):
    assert voice_motion(P, P) == STATIC


def test_pc_mask():
    assert pc_mask([60, 64, 67]) == 145
    assert pc_mask([48, 60]) == 1
