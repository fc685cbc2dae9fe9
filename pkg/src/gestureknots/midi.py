"""Standard MIDI File (format 1) writer and reader, plus CSV export.

Layout written: track 0 holds the tempo (120 BPM); each voice gets its own
track, named after the voice id with the role as instrument name, and its
own channel (0, 1, ... skipping the percussion channel 9). Note-off is an
explicit ``0x8n pp 0x40``; running status is never used.
"""
from __future__ import annotations

import csv
import io
import struct
from collections import defaultdict, deque

from .errors import InvalidEvent, MalformedChunk, OutOfRange, TooManyVoices, TruncatedFile
from .sonify import HelixLines, NoteEvent, Score

TEMPO_US_PER_QUARTER = 500_000  # 120 BPM
MAX_VOICES = 15
NOTE_OFF_VELOCITY = 0x40

GM_PROGRAMS = {
    "celesta": 8,
    "glockenspiel": 9,
    "chimes": 14,
    "violin": 40,
    "viola": 41,
    "cello": 42,
    "double bass": 43,
    "harp": 46,
}


def vlq_encode(n: int) -> bytes:
    """Variable-length quantity: 7-bit groups, continuation bit on all but the last."""
    if not 0 <= n < 1 << 28:
        raise OutOfRange(f"VLQ value {n} outside 0..2^28-1")
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.append(0x80 | (n & 0x7F))
        n >>= 7
    return bytes(reversed(out))


def vlq_decode(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for k in range(4):
        if pos >= len(data):
            raise TruncatedFile("file ends inside a variable-length quantity")
        b = data[pos]
        pos += 1
        value = (value << 7) | (b & 0x7F)
        if not b & 0x80:
            return value, pos
    raise MalformedChunk("variable-length quantity longer than four bytes")


def channel_for(index: int) -> int:
    ch = index if index < 9 else index + 1
    if ch > 15:
        raise TooManyVoices(f"at most {MAX_VOICES} voices fit the melodic channels")
    return ch


def _chunk(tag: bytes, body: bytes) -> bytes:
    return tag + struct.pack(">I", len(body)) + body


def _meta(kind: int, payload: bytes) -> bytes:
    return bytes([0xFF, kind]) + vlq_encode(len(payload)) + payload


def _track(timed: list[tuple[int, bytes]]) -> bytes:
    body = bytearray()
    now = 0
    for t, msg in timed:
        body += vlq_encode(t - now)
        body += msg
        now = t
    body += b"\x00" + _meta(0x2F, b"")
    return _chunk(b"MTrk", bytes(body))


def _check_representable(vid: str, events) -> None:
    # one channel cannot carry two sounding copies of a pitch: the offs
    # would be ambiguous to pair, so such a score has no faithful encoding
    last_end: dict[int, int] = {}
    for e in sorted(events, key=lambda e: (e.onset, e.pitch)):
        if e.onset < last_end.get(e.pitch, 0):
            raise InvalidEvent(
                f"voice {vid!r}: overlapping notes of pitch {e.pitch} at tick {e.onset}"
            )
        last_end[e.pitch] = max(last_end.get(e.pitch, 0), e.end)


def write_smf(score: Score) -> bytes:
    """Encode ``score``; overlapping same-pitch notes in one voice raise ``InvalidEvent``."""
    if len(score.voices) > MAX_VOICES:
        raise TooManyVoices(f"{len(score.voices)} voices; at most {MAX_VOICES}")
    if not 1 <= score.ticks_per_quarter < 0x8000:
        raise InvalidEvent("ticks_per_quarter must be in 1..32767")
    tracks = [_track([(0, _meta(0x51, TEMPO_US_PER_QUARTER.to_bytes(3, "big")))])]
    by_voice = defaultdict(list)
    for e in score.events:
        by_voice[e.voice].append(e)
    for idx, (vid, role) in enumerate(score.voices):
        ch = channel_for(idx)
        _check_representable(vid, by_voice.get(vid, ()))
        timed = [
            (0, _meta(0x03, vid.encode("utf-8"))),
            (0, _meta(0x04, role.encode("utf-8"))),
        ]
        if role in GM_PROGRAMS:
            timed.append((0, bytes([0xC0 | ch, GM_PROGRAMS[role]])))
        msgs = []
        for e in by_voice.get(vid, ()):
            # offs sort before ons at the same tick so repeated pitches pair up
            msgs.append((e.onset, 1, e.pitch, bytes([0x90 | ch, e.pitch, e.velocity])))
            msgs.append((e.end, 0, e.pitch, bytes([0x80 | ch, e.pitch, NOTE_OFF_VELOCITY])))
        msgs.sort(key=lambda m: m[:3])
        timed += [(t, msg) for t, _, _, msg in msgs]
        tracks.append(_track(timed))
    header = _chunk(b"MThd", struct.pack(">HHH", 1, len(tracks), score.ticks_per_quarter))
    return header + b"".join(tracks)


def _read_chunk(data: bytes, pos: int, expect: bytes) -> tuple[bytes, int]:
    if pos + 8 > len(data):
        raise TruncatedFile(f"file ends before the {expect.decode()} chunk header")
    tag = data[pos:pos + 4]
    if tag != expect:
        raise MalformedChunk(f"expected {expect.decode()} chunk at byte {pos}, found {tag!r}")
    (length,) = struct.unpack(">I", data[pos + 4:pos + 8])
    end = pos + 8 + length
    if end > len(data):
        raise TruncatedFile(f"{expect.decode()} chunk at byte {pos} runs past the end of the file")
    return data[pos + 8:end], end


def _parse_track(body: bytes, fallback_name: str):
    pos = 0
    now = 0
    status = None
    name = None
    role = None
    pending: dict[tuple[int, int], deque] = defaultdict(deque)
    notes = []
    ended = False
    while pos < len(body):
        delta, pos = vlq_decode(body, pos)
        now += delta
        if pos >= len(body):
            raise TruncatedFile("track ends after a delta time")
        b = body[pos]
        if b == 0xFF:
            if pos + 2 > len(body):
                raise TruncatedFile("track ends inside a meta event")
            kind = body[pos + 1]
            length, pos = vlq_decode(body, pos + 2)
            if pos + length > len(body):
                raise TruncatedFile("meta event runs past the track end")
            payload = body[pos:pos + length]
            pos += length
            if kind == 0x03:
                name = payload.decode("utf-8", "replace")
            elif kind == 0x04:
                role = payload.decode("utf-8", "replace")
            elif kind == 0x2F:
                ended = True
                break
            continue
        if b in (0xF0, 0xF7):
            length, pos = vlq_decode(body, pos + 1)
            pos += length
            continue
        if b & 0x80:
            status = b
            pos += 1
        elif status is None:
            raise MalformedChunk("data byte without a running status")
        kind = status & 0xF0
        size = 1 if kind in (0xC0, 0xD0) else 2
        if pos + size > len(body):
            raise TruncatedFile("track ends inside a channel message")
        d = body[pos:pos + size]
        pos += size
        ch = status & 0x0F
        if kind == 0x90 and d[1] > 0:
            pending[(ch, d[0])].append((now, d[1]))
        elif kind == 0x80 or (kind == 0x90 and d[1] == 0):
            queue = pending[(ch, d[0])]
            if not queue:
                raise MalformedChunk(f"note-off for pitch {d[0]} without a note-on")
            start, vel = queue.popleft()
            notes.append((start, now - start, d[0], vel))
    if not ended:
        raise TruncatedFile("track has no End-of-Track event")
    if any(pending.values()):
        raise MalformedChunk("note-on without a matching note-off")
    return name or fallback_name, role or "", notes


def read_smf(data: bytes) -> Score:
    """Parse a format 0/1 file back into a Score (voices from track names)."""
    data = bytes(data)
    head, pos = _read_chunk(data, 0, b"MThd")
    if len(head) < 6:
        raise MalformedChunk("MThd chunk shorter than 6 bytes")
    fmt, ntrks, division = struct.unpack(">HHH", head[:6])
    if fmt not in (0, 1):
        raise MalformedChunk(f"unsupported SMF format {fmt}")
    if division & 0x8000:
        raise MalformedChunk("SMPTE time division is not supported")
    voices = []
    events = []
    for k in range(ntrks):
        body, pos = _read_chunk(data, pos, b"MTrk")
        name, role, notes = _parse_track(body, f"track{k}")
        if k == 0 and fmt == 1 and not notes and name == "track0":
            continue
        if not notes and not role and name == f"track{k}":
            continue
        voices.append((name, role))
        events += [NoteEvent(name, on, dur, p, v) for on, dur, p, v in notes]
    return Score(division, tuple(voices), tuple(events))


def export_csv(lines: HelixLines | None) -> str:
    """``step,voice,pitch,unison`` rows ordered by step, then voice (1-based)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "voice", "pitch", "unison"])
    if lines is not None:
        unisons = set(lines.unison_steps)
        for n in range(lines.length):
            for v, pitches in enumerate(lines.pitches, start=1):
                w.writerow([n, v, pitches[n], 1 if n in unisons else 0])
    return buf.getvalue()
