import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stylerank.midi import (
    MidiParseError,
    Note,
    extract_melody,
    indicator,
    is_onset,
    is_tie,
    normalize_notes,
    notes_from_json,
    notes_to_json,
    parse_midi,
    pc_is,
    segment_chords,
    write_midi,
)

HEADER_480 = bytes.fromhex("4d546864 00000006 0000 0001 01e0")


def track(hexbody):
    body = bytes.fromhex(hexbody)
    return b"MTrk" + len(body).to_bytes(4, "big") + body


def smf(fmt, ppq, *tracks):
    return (b"MThd" + (6).to_bytes(4, "big") + fmt.to_bytes(2, "big")
            + len(tracks).to_bytes(2, "big") + ppq.to_bytes(2, "big") + b"".join(tracks))


SINGLE_480 = HEADER_480 + track("00 903c40 8360 803c40 00ff2f00")
SINGLE_96 = smf(0, 96, track("00 903c40 60 803c40 00ff2f00"))


def test_single_note():
    assert SINGLE_480.hex() == (
        "4d546864000000060000000101e0"
        "4d54726b0000000d00903c408360803c4000ff2f00"
    )
    assert parse_midi(SINGLE_480) == [Note(0, 480, 60, 0, 0)]


def test_resolution_rescale():
    assert parse_midi(SINGLE_96) == [Note(0, 480, 60, 0, 0)]


def test_two_track_file():
    data = smf(1, 480,
               track("00 903c40 8360 803c40 00ff2f00"),
               track("8170 914050 8360 814000 00ff2f00"))
    assert data[8:10] == b"\x00\x01" and data[10:12] == b"\x00\x02"
    notes = parse_midi(data)
    assert notes == [Note(0, 480, 60, 0, 0), Note(240, 480, 64, 1, 1)]


def test_running_status_and_zero_velocity_off():
    data = smf(0, 480, track("00 903c40 00 4040 8360 3c00 00 4000 00ff2f00"))
    assert parse_midi(data) == [Note(0, 480, 60), Note(0, 480, 64)]


def test_unmatched_note_on_closed_at_end_of_track():
    data = smf(0, 480, track("00 903c40 8740 ff2f00"))
    assert parse_midi(data) == [Note(0, 960, 60)]


def test_meta_and_sysex_are_skipped():
    data = smf(0, 480, track("00 ff510307a120 00 f00343123f7 00 903c40 8360 803c40 00ff2f00"
                             .replace("f00343123f7", "f003431237")))
    assert parse_midi(data) == [Note(0, 480, 60)]


def test_zero_length_notes_dropped():
    data = smf(0, 480, track("00 903c40 00 803c40 00ff2f00"))
    assert parse_midi(data) == []


def test_drums_can_be_excluded():
    data = smf(0, 480, track("00 99243c 8360 89243c 00 903c40 8360 803c40 00ff2f00"))
    assert len(parse_midi(data)) == 2
    assert parse_midi(data, exclude_drums=True) == [Note(480, 480, 60)]


def test_bad_header():
    with pytest.raises(MidiParseError) as err:
        parse_midi(b"RIFF" + SINGLE_480[4:])
    assert err.value.offset == 0


def test_truncated_track():
    data = SINGLE_480[:-3]
    with pytest.raises(MidiParseError) as err:
        parse_midi(data)
    assert err.value.offset == 14
    assert "offset 14" in str(err.value)


def test_invalid_vlq():
    data = smf(0, 480, track("81818181 00 903c40"))
    with pytest.raises(MidiParseError) as err:
        parse_midi(data)
    assert err.value.offset == 22


def test_format_2_rejected():
    with pytest.raises(MidiParseError):
        parse_midi(smf(2, 480, track("00ff2f00")))


def test_overlapping_same_pitch_merged():
    notes = normalize_notes([Note(0, 480, 60), Note(240, 480, 60), Note(0, 0, 62)])
    assert notes == [Note(0, 720, 60)]


N1 = Note(0, 2, 60)
N2 = Note(1, 1, 64)


def test_segment_example():
    c0, c1 = segment_chords([N1, N2])
    assert c0.notes == (N1,)
    assert c1.notes == (N1, N2)
    assert c0.duration_ticks == 1
    assert c1.duration_ticks == 1


def test_segment_single_and_unison():
    (c,) = segment_chords([Note(5, 7, 60)])
    assert c.duration_ticks == 7 and c.onset_time == 5
    (c,) = segment_chords([Note(0, 4, 60), Note(0, 4, 67)])
    assert len(c.notes) == 2
    with pytest.raises(ValueError, match="no notes"):
        segment_chords([])


def test_is_onset_examples():
    _, c1 = segment_chords([N1, N2])
    assert is_onset(c1, N2) == 1
    assert is_onset(c1, N1) == 0
    (c,) = segment_chords([N1])
    assert is_onset(c, N1) == 1
    with pytest.raises(ValueError):
        is_onset(c, N2)


def test_indicator_examples():
    _, c1 = segment_chords([N1, N2])
    assert indicator(c1, [is_onset, pc_is(4)]) == 1
    assert indicator(c1, [is_onset, pc_is(0)]) == 0
    assert indicator(c1, [lambda c, n: 1]) == 1
    with pytest.raises(ValueError):
        indicator(c1, [])


def test_melody_examples():
    notes = [Note(0, 1, 60), Note(0, 1, 64), Note(0, 2, 67), Note(1, 1, 59)]
    assert extract_melody(segment_chords(notes)) == [67, 59]
    held = segment_chords([Note(0, 2, 60), Note(0, 1, 64)])
    assert extract_melody(held) == [64]
    mono = [Note(i, 1, p) for i, p in enumerate([60, 62, 64, 62])]
    assert extract_melody(segment_chords(mono)) == [60, 62, 64, 62]


notes_strategy = st.lists(
    st.builds(Note, st.integers(0, 50), st.integers(1, 20), st.integers(40, 80)),
    min_size=1, max_size=25,
).map(normalize_notes).filter(bool)


@given(notes_strategy)
def test_every_note_in_consecutive_chords(notes):
    chords = segment_chords(notes)
    for n in notes:
        hits = [c.index for c in chords if n in c.notes]
        assert hits
        assert hits == list(range(hits[0], hits[-1] + 1))
    for a, b in zip(chords, chords[1:]):
        assert a.onset_time < b.onset_time
    for c in chords:
        assert c.notes
        for n in c.notes:
            assert n.onset <= c.onset_time < n.end
            assert is_onset(c, n) + is_tie(c, n) == 1


@given(notes_strategy)
def test_duration_sum_on_gap_free_input(notes):
    start = min(n.onset for n in notes)
    end = max(n.end for n in notes)
    covered = set()
    for n in notes:
        covered.update(range(n.onset, n.end))
    if covered != set(range(start, end)):
        return
    assert sum(c.duration_ticks for c in segment_chords(notes)) == end - start


@settings(max_examples=50)
@given(notes_strategy)
def test_write_then_parse_is_idempotent(notes):
    parsed = parse_midi(write_midi(notes))
    assert [(n.onset, n.duration, n.pitch) for n in parsed] == [
        (n.onset, n.duration, n.pitch) for n in notes
    ]
    assert segment_chords(parse_midi(write_midi(parsed))) == segment_chords(parsed)


def test_json_roundtrip():
    notes = [Note(0, 480, 60, 1, 2), Note(480, 240, 62)]
    assert notes_from_json(notes_to_json(notes)) == notes
