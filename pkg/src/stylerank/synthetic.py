"""Toy generative styles for demonstrations and tests.

A :class:`StyleProcess` writes block-chord pieces with a skyline melody.
Styles differ in the chord qualities they draw from, in their rhythm
vocabulary, and in how often they sustain notes across chord changes.  Each
piece gets its own key and its own random preference over chord roots, so
files within one style vary a good deal.
"""

from dataclasses import dataclass

import numpy as np

from .midi import Note

__all__ = ["StyleProcess", "STYLE_A", "STYLE_B", "generate_piece", "generate_corpus"]


@dataclass(frozen=True)
class StyleProcess:
    name: str
    qualities: tuple          # pitch-class sets relative to the chord root
    quality_weights: tuple
    durations: tuple          # note lengths in ticks at 480 per quarter
    duration_weights: tuple
    roots: tuple = (0, 2, 4, 5, 7, 9)  # scale degrees (semitones) for chord roots
    hold_bass: float = 0.0    # chance the bass is sustained into the next chord
    passing: float = 0.3      # chance of an extra melody note inside a chord
    length: tuple = (40, 80)  # min/max chords per piece
    concentration: float = 1.0  # Dirichlet concentration of per-piece root weights
    quality_concentration: float = 0.0  # >0: per-piece Dirichlet around quality_weights
    color_qualities: tuple = ()  # occasional chord qualities outside the main mix
    color_rate: float = 0.0
    color_durations: tuple = ()  # occasional note lengths outside the main mix
    color_duration_rate: float = 0.0


_SHARED = dict(
    qualities=((0, 4, 7), (0, 3, 7), (0, 4, 7, 11), (0, 4, 7, 10)),
    quality_weights=(0.4, 0.35, 0.1, 0.15),
    durations=(480, 960, 240),
    duration_weights=(0.6, 0.3, 0.1),
    hold_bass=0.15,
    concentration=0.5,
    quality_concentration=2.0,
)

# B shares A's mix and adds rare diminished triads and dotted quarters, so
# the two styles overlap heavily and only differ in low-frequency detail
STYLE_A = StyleProcess(name="A", **_SHARED)

STYLE_B = StyleProcess(
    name="B",
    color_qualities=((0, 3, 6),),
    color_rate=0.08,
    color_durations=(720,),
    color_duration_rate=0.08,
    **_SHARED,
)


def _choice(rng, items, weights):
    w = np.asarray(weights, dtype=float)
    return items[rng.choice(len(items), p=w / w.sum())]


def generate_piece(process, rng):
    """One piece as a list of :class:`~stylerank.midi.Note`."""
    key = int(rng.integers(12))
    root_weights = rng.dirichlet(np.full(len(process.roots), process.concentration))
    if process.quality_concentration > 0:
        q_weights = rng.dirichlet(
            process.quality_concentration * np.asarray(process.quality_weights, dtype=float)
        )
    else:
        q_weights = process.quality_weights
    n_chords = int(rng.integers(process.length[0], process.length[1] + 1))
    notes = []
    t = 0
    held = None  # (pitch, onset) of a bass note carried into the next chord
    for _ in range(n_chords):
        root = (key + _choice(rng, process.roots, root_weights)) % 12
        if process.color_qualities and rng.random() < process.color_rate:
            quality = process.color_qualities[rng.integers(len(process.color_qualities))]
        else:
            quality = _choice(rng, process.qualities, q_weights)
        if process.color_durations and rng.random() < process.color_duration_rate:
            dur = int(process.color_durations[rng.integers(len(process.color_durations))])
        else:
            dur = int(_choice(rng, process.durations, process.duration_weights))
        bass = 36 + root
        upper = sorted(48 + (root + iv) % 12 for iv in quality[1:])
        if held is not None and held[0] == bass:
            bass_onset = held[1]
        else:
            if held is not None:
                notes.append(Note(held[1], t - held[1], held[0]))
            bass_onset = t
        if rng.random() < process.hold_bass:
            held = (bass, bass_onset)
        else:
            held = None
            notes.append(Note(bass_onset, t + dur - bass_onset, bass))
        for p in upper:
            notes.append(Note(t, dur, p))
        mel = 60 + (root + int(rng.choice(quality))) % 12 + 12 * int(rng.integers(2))
        if dur >= 480 and rng.random() < process.passing:
            half = dur // 2
            notes.append(Note(t, half, mel))
            step = int(rng.choice((-2, -1, 1, 2)))
            notes.append(Note(t + half, dur - half, mel + step))
        else:
            notes.append(Note(t, dur, mel))
        t += dur
    if held is not None:
        notes.append(Note(held[1], t - held[1], held[0]))
    notes.sort(key=lambda n: (n.onset, n.pitch))
    return notes


def generate_corpus(process, count, seed):
    """``count`` independent pieces of one style."""
    rng = np.random.default_rng(seed)
    return [generate_piece(process, rng) for _ in range(count)]
