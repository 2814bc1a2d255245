"""
Reading MIDI into chords
========================

Files are parsed into notes at 480 ticks per quarter, then cut into chords
at every distinct onset.  Notes that keep sounding across a cut appear in
both chords as ties.
"""

from stylerank.midi import Note, extract_melody, is_onset, parse_midi, segment_chords, write_midi

notes = [
    Note(0, 960, 48),    # held bass
    Note(0, 480, 60),
    Note(0, 480, 64),
    Note(480, 480, 62),
    Note(480, 480, 67),
]

# write the same music at 96 ticks per quarter; reading rescales to 480
coarse = [Note(n.onset // 5, n.duration // 5, n.pitch) for n in notes]
data = write_midi(coarse, ppq=96)
print(len(data), "bytes:", data[:14].hex())
parsed = parse_midi(data)
print(parsed == notes)

for chord in segment_chords(parsed):
    flags = [is_onset(chord, n) for n in chord.notes]
    print(chord.onset_time, chord.duration_ticks, chord.pitches, flags)

# the highest newly struck pitch of each chord
print("melody:", extract_melody(segment_chords(parsed)))
