"""DNA to music: helix voices, base dyads and harp glissandi on one score.

Three layers sound together, one step (``step_ticks``) per sequence
position:

* the double helix as sinusoid-sampled string lines that meet in unison
  wherever the continuous sinusoids cross;
* each base as a dyad (A: A-C, C: C-E, T: B-D, G: G-B) on a rotating
  percussion instrument;
* a harp glissando joining each dyad to the next.

Optional sections (coiling, supercoiling, concatenation) follow the main
layer in time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import EmptyPattern, InvalidEvent
from .fasta import DnaSequence

# --- constants ---------------------------------------------------------------------

VELOCITY = {"pp": 32, "p": 48, "mp": 64, "mf": 72, "f": 88, "ff": 104}

PITCH_CLASSES = {"A": ("A", "C"), "C": ("C", "E"), "T": ("B", "D"), "G": ("G", "B")}
INTERVAL_NAMES = {3: "minor third", 4: "major third"}
DEFAULT_DYADS = {"A": (69, 72), "C": (60, 64), "T": (71, 74), "G": (67, 71)}

PERCUSSION = ("chimes", "glockenspiel", "celesta")
HELIX_ROLES = ("violin", "cello", "viola", "double bass")
HARP = "harp"

C_MAJOR = (0, 2, 4, 5, 7, 9, 11)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def snap_to_scale(pitch: float, scale: Sequence[int] = C_MAJOR) -> int:
    """Nearest pitch whose pitch class is in ``scale``; ties go up."""
    best = None
    for cand in range(int(math.floor(pitch)) - 12, int(math.ceil(pitch)) + 13):
        if cand % 12 not in scale:
            continue
        key = (abs(cand - pitch), -cand)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


# --- score model ---------------------------------------------------------------------

@dataclass(frozen=True)
class NoteEvent:
    voice: str
    onset: int
    duration: int
    pitch: int
    velocity: int = VELOCITY["mp"]

    def __post_init__(self):
        if self.duration <= 0:
            raise InvalidEvent(f"duration must be positive, got {self.duration}")
        if self.onset < 0:
            raise InvalidEvent(f"onset must be non-negative, got {self.onset}")
        if not 0 <= self.pitch <= 127:
            raise InvalidEvent(f"pitch {self.pitch} outside 0..127")
        if not 1 <= self.velocity <= 127:
            raise InvalidEvent(f"velocity {self.velocity} outside 1..127")

    @property
    def end(self) -> int:
        return self.onset + self.duration

    def sort_key(self):
        return (self.onset, self.voice, self.pitch, self.duration, self.velocity)


@dataclass(frozen=True)
class Score:
    """Events are kept sorted by ``(onset, voice, pitch, ...)``."""

    ticks_per_quarter: int = 480
    voices: tuple[tuple[str, str], ...] = ()
    events: tuple[NoteEvent, ...] = ()

    def __post_init__(self):
        voices = tuple((str(v), str(r)) for v, r in self.voices)
        ids = [v for v, _ in voices]
        if len(set(ids)) != len(ids):
            raise InvalidEvent(f"duplicate voice ids: {ids}")
        known = set(ids)
        for e in self.events:
            if e.voice not in known:
                raise InvalidEvent(f"event on unknown voice {e.voice!r}")
        object.__setattr__(self, "voices", voices)
        object.__setattr__(self, "events", tuple(sorted(self.events, key=NoteEvent.sort_key)))

    def voice_events(self, voice: str) -> list[NoteEvent]:
        return [e for e in self.events if e.voice == voice]

    @property
    def end(self) -> int:
        return max((e.end for e in self.events), default=0)


# --- parameters ------------------------------------------------------------------------

@dataclass(frozen=True)
class HelixParams:
    strand_count: int = 2
    samples_per_turn: int = 16
    pitch_low: int = 55
    pitch_high: int = 79
    step_ticks: int = 240
    phase_offsets: tuple[float, ...] = (0.0, math.pi)

    def __post_init__(self):
        if self.strand_count not in (2, 3, 4):
            raise ValueError("strand_count must be 2, 3 or 4")
        if self.samples_per_turn < 4:
            raise ValueError("samples_per_turn must be at least 4")
        if not 0 <= self.pitch_low < self.pitch_high <= 127:
            raise ValueError("need 0 <= pitch_low < pitch_high <= 127")
        if self.step_ticks < 1:
            raise ValueError("step_ticks must be positive")
        if len(self.phase_offsets) < 2:
            raise ValueError("at least two phase offsets (the double helix)")
        object.__setattr__(self, "phase_offsets", tuple(float(p) for p in self.phase_offsets))


@dataclass(frozen=True)
class DynamicsEnvelope:
    """Dynamic labels cycled over consecutive spans; each label lasts ``repeat`` spans."""

    labels: tuple[str, ...] = ("p", "mf", "ff", "mf", "p")
    repeat: int = 1

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise ValueError("envelope needs at least one label")
        bad = [lab for lab in labels if lab not in VELOCITY]
        if bad:
            raise ValueError(f"unknown dynamic labels {bad}; use {list(VELOCITY)}")
        if self.repeat < 1:
            raise ValueError("repeat must be at least 1")
        object.__setattr__(self, "labels", labels)

    def velocity(self, span_index: int) -> int:
        return VELOCITY[self.labels[(span_index // self.repeat) % len(self.labels)]]

    @property
    def cycle_spans(self) -> int:
        return len(self.labels) * self.repeat


@dataclass(frozen=True)
class SonifyOptions:
    dyads: Mapping[str, tuple[int, int]] = field(default_factory=lambda: dict(DEFAULT_DYADS))
    diatonic: bool = False
    glissando_steps: int = 4
    diatonic_glissando: bool = False
    helix_steps: int | None = None
    augmentation: int = 2
    transposition: int = 12
    helix_velocity: int = VELOCITY["mp"]
    dyad_velocity: int = VELOCITY["mf"]
    harp_velocity: int = VELOCITY["p"]
    coiling: bool = False
    coil_period: int = 4
    supercoiling: bool = False
    envelope: DynamicsEnvelope = field(default_factory=DynamicsEnvelope)
    concatenation: bool = False
    compression: Fraction = Fraction(1, 2)

    @classmethod
    def from_pairs(cls, pairs: Mapping[str, str]) -> "SonifyOptions":
        """Build from ``key=value`` strings (CLI / config file)."""
        kw = {}
        types = {f.name: f for f in fields(cls)}
        for key, raw in pairs.items():
            key = key.strip().replace("-", "_")
            raw = str(raw).strip()
            if key not in types:
                raise ValueError(f"unknown sonify option {key!r}")
            if key in ("diatonic", "diatonic_glissando", "coiling", "supercoiling", "concatenation"):
                if raw.lower() not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                    raise ValueError(f"option {key} expects a boolean, got {raw!r}")
                kw[key] = raw.lower() in ("1", "true", "yes", "on")
            elif key == "helix_steps":
                kw[key] = None if raw.lower() in ("", "none", "auto") else int(raw)
            elif key == "compression":
                kw[key] = Fraction(raw)
            elif key == "envelope":
                kw[key] = DynamicsEnvelope(tuple(x for x in raw.replace(",", " ").split()))
            elif key == "dyads":
                table = dict(DEFAULT_DYADS)
                for item in raw.split(","):
                    base, _, pitches = item.partition(":")
                    lo, _, hi = pitches.partition("/")
                    table[base.strip().upper()] = (int(lo), int(hi))
                kw[key] = table
            else:
                kw[key] = int(raw)
        return cls(**kw)


# --- helix --------------------------------------------------------------------------

@dataclass(frozen=True)
class HelixLines:
    """``pitches[voice][step]``; ``unison_steps`` are the rendered strand crossings."""

    pitches: tuple[tuple[int, ...], ...]
    unison_steps: tuple[int, ...]

    @property
    def length(self) -> int:
        return len(self.pitches[0]) if self.pitches else 0


def rescale(value: float, low: int, high: int) -> float:
    return low + (value + 1.0) / 2.0 * (high - low)


def crossing_times(phase_a: float, phase_b: float, period: int, length: int) -> list[float]:
    """Step-valued times ``t`` in ``[-1/2, length - 1/2)`` where
    ``sin(2 pi t / P + a) == sin(2 pi t / P + b)``.

    Solved in closed form: the sinusoids agree where
    ``2 theta + a + b = pi (2m + 1)``. Identical phases (mod 2 pi) agree
    everywhere and are reported at every step.
    """
    diff = (phase_a - phase_b) / (2 * math.pi)
    if abs(diff - round(diff)) < 1e-12:
        return [float(n) for n in range(length)]
    out = []
    offset = period * (phase_a + phase_b) / (4 * math.pi)
    m_lo = math.floor((-0.5 + offset) * 2 / period - 1) - 1
    m_hi = math.ceil((length + offset) * 2 / period) + 1
    for m in range(m_lo, m_hi + 1):
        t = period * (2 * m + 1) / 4 - offset
        if -0.5 <= t < length - 0.5:
            out.append(t)
    return sorted(out)


def helix_lines(params: HelixParams, length: int, diatonic: bool = False) -> HelixLines:
    """Sample one sinusoid per phase offset and turn the values into pitches.

    Voice ``k`` at step ``n`` takes ``sin(2 pi n / P + phase_k)``, rescaled
    linearly from [-1, 1] onto [pitch_low, pitch_high] and rounded half up
    (or snapped to C major when ``diatonic``). A crossing of two continuous
    sinusoids is assigned to its nearest step, where both voices are set to
    the pitch of the lower-numbered one.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    P = params.samples_per_turn
    voices = []
    for phase in params.phase_offsets:
        line = []
        for n in range(length):
            x = rescale(math.sin(2 * math.pi * n / P + phase), params.pitch_low, params.pitch_high)
            line.append(snap_to_scale(x) if diatonic else round_half_up(x))
        voices.append(line)
    unisons = set()
    k = len(voices)
    for i in range(k):
        for j in range(i + 1, k):
            for t in crossing_times(params.phase_offsets[i], params.phase_offsets[j], P, length):
                n = round_half_up(t)
                if 0 <= n < length:
                    voices[j][n] = voices[i][n]
                    unisons.add(n)
    return HelixLines(tuple(tuple(v) for v in voices), tuple(sorted(unisons)))


@dataclass(frozen=True)
class Line:
    """A monophonic line: pitches with per-note durations in ticks."""

    pitches: tuple[int, ...]
    durations: tuple[int, ...]
    clamped: bool = False

    def __post_init__(self):
        if len(self.pitches) != len(self.durations):
            raise ValueError("pitches and durations differ in length")

    @classmethod
    def uniform(cls, pitches: Iterable[int], step_ticks: int) -> "Line":
        pitches = tuple(pitches)
        return cls(pitches, (step_ticks,) * len(pitches))

    @property
    def total_duration(self) -> int:
        return sum(self.durations)

    def events(self, voice: str, onset: int = 0, velocity: int = VELOCITY["mp"]) -> list[NoteEvent]:
        out = []
        t = onset
        for p, d in zip(self.pitches, self.durations):
            out.append(NoteEvent(voice, t, d, p, velocity))
            t += d
        return out


def multi_helix_transform(line: Line, factor: int, transpose: int) -> Line:
    """Augment durations by ``factor`` and shift pitches, clamping to 0..127."""
    if factor < 1:
        raise ValueError("augmentation factor must be at least 1")
    clamped = False
    pitches = []
    for p in line.pitches:
        q = p + transpose
        if q < 0 or q > 127:
            clamped = True
            q = min(max(q, 0), 127)
        pitches.append(q)
    return Line(tuple(pitches), tuple(d * factor for d in line.durations), clamped or line.clamped)


# --- coiling, supercoiling, concatenation -----------------------------------------------

def render_coiling(pivot: int, pattern: Sequence[int], period: int, length: int | None = None) -> list[int]:
    """Melody that returns to ``pivot`` at every position ``n % period == 0``.

    Other positions take ``pattern`` notes in order (cycling if ``length``
    asks for more). The pivot is sounded twice in a row, marking the
    superposition point. By default the output ends once the pattern has
    been used up.
    """
    if not pattern:
        raise EmptyPattern("coiling needs a non-empty pattern")
    if period < 2:
        raise ValueError("period must be at least 2")
    if length is None:
        length = len(pattern) + math.ceil(len(pattern) / (period - 1))
    out = []
    k = 0
    for n in range(length):
        if n % period == 0:
            out += [pivot, pivot]
        else:
            out.append(pattern[k % len(pattern)])
            k += 1
    return out


def apply_supercoiling(events: Sequence[NoteEvent], env: DynamicsEnvelope, span: int) -> list[NoteEvent]:
    """Set velocities span by span from the envelope; pitches stay put.

    Span ``j`` covers onsets ``[t0 + j*span, t0 + (j+1)*span)`` where ``t0`` is
    the earliest onset.
    """
    if span <= 0:
        raise ValueError("span must be positive")
    if not events:
        return []
    t0 = min(e.onset for e in events)
    return [replace(e, velocity=env.velocity((e.onset - t0) // span)) for e in events]


def _scale_ticks(x: int, c: Fraction) -> int:
    return int(math.floor(Fraction(x) * c + Fraction(1, 2)))


def render_concatenation(
    patterns: Sequence[Sequence[NoteEvent]],
    compression: Fraction | float,
    voices: Sequence[str] | None = None,
    onset: int = 0,
) -> list[NoteEvent]:
    """Overlay time-compressed patterns, each on its own voice, from ``onset``."""
    c = Fraction(compression).limit_denominator(1 << 20)
    if c <= 0:
        raise ValueError("compression must be positive")
    if voices is None:
        voices = [f"concat{k + 1}" for k in range(len(patterns))]
    if len(voices) < len(patterns):
        raise ValueError("need one voice per pattern")
    out = []
    for pat, voice in zip(patterns, voices):
        if not pat:
            continue
        t0 = min(e.onset for e in pat)
        for e in pat:
            out.append(
                replace(
                    e,
                    voice=voice,
                    onset=onset + _scale_ticks(e.onset - t0, c),
                    duration=max(1, _scale_ticks(e.duration, c)),
                )
            )
    return out


def glissando(
    from_dyad: Sequence[int],
    to_dyad: Sequence[int],
    duration: int,
    steps: int,
    onset: int = 0,
    voice: str = HARP,
    velocity: int = VELOCITY["p"],
    diatonic: bool = False,
) -> list[NoteEvent]:
    """Run of ``steps`` equal notes from the top of one dyad to the top of the next."""
    if steps < 2:
        raise ValueError("a glissando needs at least two steps")
    a, b = max(from_dyad), max(to_dyad)
    each = max(1, duration // steps)
    out = []
    for k in range(steps):
        x = a + (b - a) * k / (steps - 1)
        p = snap_to_scale(x) if diatonic else round_half_up(x)
        if k == 0:
            p = a
        elif k == steps - 1:
            p = b
        out.append(NoteEvent(voice, onset + k * each, each, p, velocity))
    return out


def base_dyad(base: str, table: Mapping[str, tuple[int, int]] | None = None):
    """Pitch pair and interval name for a base, e.g. ``A -> ((69, 72), 'minor third')``."""
    table = DEFAULT_DYADS if table is None else table
    lo, hi = table[base]
    return (lo, hi), INTERVAL_NAMES.get(hi - lo, f"{hi - lo} semitones")


# --- assembly ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rendering:
    score: Score
    helix: HelixLines
    dyads: tuple[tuple[int, str, tuple[int, int]], ...]
    glissandi: tuple[tuple[NoteEvent, ...], ...]
    helix_voices: tuple[str, ...]
    clamped: bool = False


def helix_length(seq: DnaSequence, params: HelixParams, options: SonifyOptions) -> int:
    """Default: the sequence length rounded up to whole helix turns."""
    if options.helix_steps is not None:
        return options.helix_steps
    P = params.samples_per_turn
    return max(1, math.ceil(len(seq) / P)) * P


def render_dna(seq: DnaSequence, params: HelixParams | None = None, options: SonifyOptions | None = None) -> Rendering:
    params = params or HelixParams()
    options = options or SonifyOptions()
    step = params.step_ticks

    lines = helix_lines(params, helix_length(seq, params, options), options.diatonic)
    voices: list[tuple[str, str]] = []
    events: list[NoteEvent] = []

    helix_ids = []
    base_lines = [Line.uniform(p, step) for p in lines.pitches[:2]]
    all_lines = list(base_lines)
    clamped = False
    for extra in range(params.strand_count - 2):
        derived = multi_helix_transform(base_lines[extra % 2], options.augmentation, options.transposition)
        clamped |= derived.clamped
        all_lines.append(derived)
    for k, line in enumerate(all_lines):
        vid = f"helix{k + 1}"
        helix_ids.append(vid)
        voices.append((vid, HELIX_ROLES[k % len(HELIX_ROLES)]))
        events += line.events(vid, 0, options.helix_velocity)

    for name in PERCUSSION:
        voices.append((name, name))
    dyads = []
    for pos, b in enumerate(seq.bases):
        pair, _ = base_dyad(b, options.dyads)
        dyads.append((pos, b, pair))
        inst = PERCUSSION[pos % len(PERCUSSION)]
        for p in pair:
            events.append(NoteEvent(inst, pos * step, step, p, options.dyad_velocity))

    voices.append((HARP, HARP))
    glis = []
    half = max(1, step // 2)
    for (pos, _, a), (_, _, b) in zip(dyads, dyads[1:]):
        run = glissando(
            a, b, half, options.glissando_steps,
            onset=pos * step + (step - half),
            velocity=options.harp_velocity,
            diatonic=options.diatonic_glissando,
        )
        glis.append(tuple(run))
        events += run

    cursor = max(e.end for e in events)
    voice1 = lines.pitches[0]
    turn = list(voice1[: params.samples_per_turn])
    coil_melody = None
    if options.coiling:
        pivot = voice1[lines.unison_steps[0]] if lines.unison_steps else voice1[0]
        coil_melody = render_coiling(pivot, turn, options.coil_period)
        coil = Line.uniform(coil_melody, step).events(helix_ids[0], cursor, VELOCITY["mf"])
        events += coil
        cursor = max(e.end for e in coil)
    if options.supercoiling:
        melody = coil_melody or turn
        one = Line.uniform(melody, step)
        reps = []
        for r in range(options.envelope.cycle_spans):
            reps += one.events(helix_ids[1], cursor + r * one.total_duration)
        reps = apply_supercoiling(reps, options.envelope, one.total_duration)
        events += reps
        cursor = max(e.end for e in reps)
    if options.concatenation:
        pats = [[e for e in events if e.voice == v and e.onset < lines.length * step] for v in helix_ids[:2]]
        events += render_concatenation(pats, options.compression, helix_ids[:2], onset=cursor)

    score = Score(480, tuple(voices), tuple(events))
    return Rendering(score, lines, tuple(dyads), tuple(glis), tuple(helix_ids), clamped)


def assemble_score(seq: DnaSequence, params: HelixParams | None = None, options: SonifyOptions | None = None) -> Score:
    return render_dna(seq, params, options).score
