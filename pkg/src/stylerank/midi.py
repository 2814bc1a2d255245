"""Standard MIDI File ingestion and chord segmentation.

Notes from every track and channel are merged into one list at a canonical
resolution of 480 ticks per quarter note.  :func:`segment_chords` slices the
note list at every distinct onset; each slice holds the notes sounding at
that instant, so a sustained note appears (as a tie) in consecutive slices.
"""

import json
import struct
from dataclasses import asdict, dataclass

__all__ = [
    "CANONICAL_PPQ",
    "DRUM_CHANNEL",
    "MidiParseError",
    "Note",
    "ChordEvent",
    "parse_midi",
    "load_notes",
    "write_midi",
    "normalize_notes",
    "segment_chords",
    "is_onset",
    "is_tie",
    "pc_is",
    "indicator",
    "extract_melody",
    "notes_to_json",
    "notes_from_json",
]

CANONICAL_PPQ = 480
DRUM_CHANNEL = 9


class MidiParseError(ValueError):
    """Raised for structurally invalid MIDI data."""

    def __init__(self, message, offset):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


@dataclass(frozen=True, order=True)
class Note:
    onset: int
    duration: int
    pitch: int
    channel: int = 0
    track: int = 0

    @property
    def end(self):
        return self.onset + self.duration


@dataclass(frozen=True)
class ChordEvent:
    """Notes sounding at one distinct onset time.

    ``notes`` is ordered by ascending pitch, then onset.
    """

    index: int
    notes: tuple
    onset_time: int
    duration_ticks: int

    @property
    def pitches(self):
        return tuple(n.pitch for n in self.notes)

    @property
    def onset_pitches(self):
        return tuple(n.pitch for n in self.notes if n.onset == self.onset_time)

    @property
    def onset_flags(self):
        return tuple(int(n.onset == self.onset_time) for n in self.notes)


# ---------------------------------------------------------------------------
# SMF reading


class _Reader:
    def __init__(self, data, pos=0, end=None):
        self.data = data
        self.pos = pos
        self.end = len(data) if end is None else end

    def need(self, n):
        if self.pos + n > self.end:
            raise MidiParseError("unexpected end of data", self.pos)

    def u8(self):
        self.need(1)
        b = self.data[self.pos]
        self.pos += 1
        return b

    def take(self, n):
        self.need(n)
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def vlq(self):
        start = self.pos
        value = 0
        for _ in range(4):
            b = self.u8()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise MidiParseError("invalid variable-length quantity", start)


_DATA_LENGTH = {0x80: 2, 0x90: 2, 0xA0: 2, 0xB0: 2, 0xC0: 1, 0xD0: 1, 0xE0: 2}


def _read_track(reader, track_index, raw):
    """Collect (onset, end, pitch, channel, track) tuples from one MTrk chunk."""
    tick = 0
    status = None
    pending = {}
    while reader.pos < reader.end:
        tick += reader.vlq()
        offset = reader.pos
        b = reader.u8()
        if b & 0x80:
            if b == 0xFF:
                meta_type = reader.u8()
                length = reader.vlq()
                reader.take(length)
                if meta_type == 0x2F:
                    break
                continue
            if b in (0xF0, 0xF7):
                reader.take(reader.vlq())
                status = None
                continue
            if b >= 0xF0:
                raise MidiParseError(f"unsupported status byte 0x{b:02X}", offset)
            status = b
            first = reader.u8()
        else:
            if status is None:
                raise MidiParseError("data byte without running status", offset)
            first = b
        kind = status & 0xF0
        channel = status & 0x0F
        second = reader.u8() if _DATA_LENGTH[kind] == 2 else None
        if first > 0x7F or (second is not None and second > 0x7F):
            raise MidiParseError("data byte out of range", offset)
        if kind == 0x90 and second > 0:
            pending.setdefault((channel, first), []).append(tick)
        elif kind == 0x80 or kind == 0x90:
            starts = pending.get((channel, first))
            if starts:
                raw.append((starts.pop(0), tick, first, channel, track_index))
    for (channel, pitch), starts in pending.items():
        for start in starts:
            raw.append((start, tick, pitch, channel, track_index))


def _rescale(tick, ppq, resolution):
    # nearest integer, halves rounded up
    return (2 * tick * resolution + ppq) // (2 * ppq)


def parse_midi(data, *, resolution=CANONICAL_PPQ, exclude_drums=False):
    """Parse SMF format 0/1 bytes into a normalized, onset-sorted note list."""
    data = bytes(data)
    if data[:4] != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    reader = _Reader(data, 4)
    length = struct.unpack(">I", reader.take(4))[0]
    if length < 6:
        raise MidiParseError("header chunk too short", 4)
    fmt, ntracks, division = struct.unpack(">HHH", reader.take(6))
    reader.take(length - 6)
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported SMF format {fmt}", 8)
    if division & 0x8000:
        raise MidiParseError("SMPTE time division is not supported", 12)
    if division == 0:
        raise MidiParseError("zero ticks per quarter note", 12)

    raw = []
    track_index = 0
    while reader.pos < len(data) and track_index < ntracks:
        chunk_start = reader.pos
        chunk_id = reader.take(4)
        size = struct.unpack(">I", reader.take(4))[0]
        if reader.pos + size > len(data):
            raise MidiParseError("truncated track chunk", chunk_start)
        if chunk_id == b"MTrk":
            _read_track(_Reader(data, reader.pos, reader.pos + size), track_index, raw)
            track_index += 1
        reader.pos += size
    if track_index < ntracks:
        raise MidiParseError(
            f"expected {ntracks} tracks, found {track_index}", reader.pos
        )

    notes = []
    for start, stop, pitch, channel, track in raw:
        if exclude_drums and channel == DRUM_CHANNEL:
            continue
        onset = _rescale(start, division, resolution)
        end = _rescale(stop, division, resolution)
        notes.append(Note(onset, end - onset, pitch, channel, track))
    return normalize_notes(notes)


def load_notes(path, **kwargs):
    with open(path, "rb") as fh:
        return parse_midi(fh.read(), **kwargs)


def normalize_notes(notes):
    """Drop zero-length notes and merge overlapping notes of equal pitch.

    A merged note spans the union of its parts and keeps the channel and
    track of the earliest one.  Output is sorted by (onset, pitch).
    """
    by_pitch = {}
    for n in notes:
        if n.duration > 0:
            by_pitch.setdefault(n.pitch, []).append(n)
    out = []
    for pitch, group in by_pitch.items():
        group.sort()
        cur = group[0]
        cur_end = cur.end
        for n in group[1:]:
            if n.onset < cur_end:
                cur_end = max(cur_end, n.end)
            else:
                out.append(Note(cur.onset, cur_end - cur.onset, pitch, cur.channel, cur.track))
                cur, cur_end = n, n.end
        out.append(Note(cur.onset, cur_end - cur.onset, pitch, cur.channel, cur.track))
    out.sort(key=lambda n: (n.onset, n.pitch, n.channel, n.track))
    return out


# ---------------------------------------------------------------------------
# SMF writing (used to build fixtures)


def _vlq_bytes(value):
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def write_midi(notes, *, ppq=CANONICAL_PPQ, velocity=80):
    """Serialize notes to SMF bytes, one track per distinct ``Note.track``.

    Format 0 is written for a single track, format 1 otherwise.  Note times
    are taken verbatim as ticks at ``ppq``.
    """
    tracks = sorted({n.track for n in notes}) or [0]
    chunks = []
    for t in tracks:
        events = []
        for n in notes:
            if n.track != t:
                continue
            # offs sort before ons at the same tick
            events.append((n.onset + n.duration, 0, 0x80 | n.channel, n.pitch, 0))
            events.append((n.onset, 1, 0x90 | n.channel, n.pitch, velocity))
        events.sort()
        body = bytearray()
        last = 0
        for tick, _, status, pitch, vel in events:
            body += _vlq_bytes(tick - last)
            body += bytes((status, pitch, vel))
            last = tick
        body += b"\x00\xff\x2f\x00"
        chunks.append(b"MTrk" + struct.pack(">I", len(body)) + bytes(body))
    fmt = 0 if len(chunks) == 1 else 1
    header = b"MThd" + struct.pack(">IHHH", 6, fmt, len(chunks), ppq)
    return header + b"".join(chunks)


# ---------------------------------------------------------------------------
# Chords


def segment_chords(notes):
    """Slice notes into one :class:`ChordEvent` per distinct onset."""
    if not notes:
        raise ValueError("no notes")
    ordered = sorted(notes, key=lambda n: (n.onset, n.pitch))
    onsets = sorted({n.onset for n in ordered})
    last_end = max(n.end for n in ordered)
    chords = []
    active = []
    k = 0
    for t, o in enumerate(onsets):
        active = [n for n in active if n.end > o]
        while k < len(ordered) and ordered[k].onset == o:
            active.append(ordered[k])
            k += 1
        members = tuple(sorted(active, key=lambda n: (n.pitch, n.onset)))
        nxt = onsets[t + 1] if t + 1 < len(onsets) else last_end
        chords.append(ChordEvent(t, members, o, nxt - o))
    return chords


def is_onset(chord, note):
    """1 if ``note`` starts at the chord's latest onset, else 0 (a tie)."""
    if note not in chord.notes:
        raise ValueError("note is not a member of the chord")
    return int(note.onset == max(n.onset for n in chord.notes))


def is_tie(chord, note):
    return 1 - is_onset(chord, note)


def pc_is(i):
    """Predicate matching notes of pitch class ``i``."""

    def predicate(chord, note):
        return int(note.pitch % 12 == i)

    predicate.__name__ = f"pc_{i}"
    return predicate


def indicator(chord, predicates):
    """1 if some note of ``chord`` satisfies every predicate, else 0."""
    predicates = list(predicates)
    if not predicates:
        raise ValueError("indicator needs at least one predicate")
    return int(any(all(f(chord, n) for f in predicates) for n in chord.notes))


def extract_melody(chords):
    """Skyline melody: highest onset pitch of each chord that has an onset."""
    melody = []
    for c in chords:
        heads = c.onset_pitches
        if heads:
            melody.append(max(heads))
    return melody


def notes_to_json(notes):
    return json.dumps([asdict(n) for n in notes])


def notes_from_json(text):
    return [Note(**rec) for rec in json.loads(text)]
