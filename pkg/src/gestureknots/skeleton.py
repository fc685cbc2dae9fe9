"""Gesture data model: skeleta (directed multigraphs) and their bodies.

A body maps every vertex to a point of 3D space and every arrow to a sampled
curve whose first and last samples are, bit for bit, the images of the
arrow's source and target.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .braid import BraidWord, permutation
from .errors import (
    DanglingArrow,
    DuplicateId,
    EndpointMismatch,
    NotATour,
    OpenTour,
    ParseError,
    SampleCountMismatch,
    SchemaError,
    StrandCountMismatch,
    UnmappedElement,
)

BRAID_DEPTH = 1.0  # z separation between over and under strand at a crossing


class Point3(NamedTuple):
    x: float
    y: float
    z: float


def as_point(p) -> Point3:
    x, y, z = (float(c) for c in p)
    return Point3(x, y, z)


@dataclass(frozen=True)
class Arrow:
    id: str
    source: str
    target: str


@dataclass(frozen=True)
class Skeleton:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "arrows", tuple(a if isinstance(a, Arrow) else Arrow(*a) for a in self.arrows)
        )

    def arrow(self, arrow_id: str) -> Arrow:
        for a in self.arrows:
            if a.id == arrow_id:
                return a
        raise KeyError(arrow_id)

    @property
    def arrow_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.arrows)

    def out_degree(self, v: str) -> int:
        return sum(1 for a in self.arrows if a.source == v)

    def is_point_arrow_point(self) -> bool:
        return (
            len(self.vertices) == 2
            and len(self.arrows) == 1
            and self.arrows[0].source != self.arrows[0].target
        )


def validate_skeleton(s: Skeleton) -> None:
    """Raise ``DuplicateId`` or ``DanglingArrow``; return ``None`` when valid."""
    if len(set(s.vertices)) != len(s.vertices):
        raise DuplicateId(f"duplicate vertex id in {list(s.vertices)}")
    ids = [a.id for a in s.arrows]
    if len(set(ids)) != len(ids):
        raise DuplicateId(f"duplicate arrow id in {ids}")
    known = set(s.vertices)
    for a in s.arrows:
        for end in (a.source, a.target):
            if end not in known:
                raise DanglingArrow(f"arrow {a.id!r} references unknown vertex {end!r}")


@dataclass(frozen=True)
class SampledCurve:
    """Curve given by samples at uniform parameter steps over [0, 1]."""

    samples: tuple[Point3, ...]

    def __post_init__(self):
        pts = tuple(as_point(p) for p in self.samples)
        if len(pts) < 2:
            raise ValueError("a sampled curve needs at least two samples")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise ValueError("curve samples must be finite")
        object.__setattr__(self, "samples", pts)

    @classmethod
    def from_array(cls, arr) -> "SampledCurve":
        return cls(tuple(map(tuple, np.asarray(arr, dtype=float).tolist())))

    @classmethod
    def segment(cls, start, end, n: int = 2) -> "SampledCurve":
        """Straight segment with exact endpoints."""
        a, b = np.asarray(start, float), np.asarray(end, float)
        pts = [as_point(a + (b - a) * (k / (n - 1))) for k in range(n)]
        pts[0], pts[-1] = as_point(start), as_point(end)
        return cls(tuple(pts))

    @cached_property
    def array(self) -> np.ndarray:
        arr = np.array(self.samples, dtype=float)
        arr.setflags(write=False)
        return arr

    def __len__(self):
        return len(self.samples)

    @property
    def start(self) -> Point3:
        return self.samples[0]

    @property
    def end(self) -> Point3:
        return self.samples[-1]

    def is_closed(self) -> bool:
        return self.samples[0] == self.samples[-1]

    def evaluate(self, t: float) -> Point3:
        """Piecewise-linear value at parameter ``t``; exact on sample parameters."""
        n = len(self.samples) - 1
        x = min(max(float(t), 0.0), 1.0) * n
        k = round(x)
        if abs(x - k) <= 1e-9 * max(1.0, n):
            return self.samples[k]
        i = min(int(math.floor(x)), n - 1)
        lam = x - i
        p, q = self.samples[i], self.samples[i + 1]
        return Point3(*(a + lam * (b - a) for a, b in zip(p, q)))

    def evaluate_many(self, ts) -> np.ndarray:
        ts = np.clip(np.asarray(ts, dtype=float), 0.0, 1.0)
        grid = np.linspace(0.0, 1.0, len(self.samples))
        return np.stack([np.interp(ts, grid, self.array[:, d]) for d in range(3)], axis=1)

    def resample(self, n: int) -> "SampledCurve":
        """``n`` uniform samples; endpoints kept verbatim."""
        if n < 2:
            raise ValueError("need at least two samples")
        pts = [self.evaluate(k / (n - 1)) for k in range(n)]
        pts[0], pts[-1] = self.samples[0], self.samples[-1]
        return SampledCurve(tuple(pts))

    def with_endpoints(self, start, end) -> "SampledCurve":
        pts = list(self.samples)
        pts[0], pts[-1] = as_point(start), as_point(end)
        return SampledCurve(tuple(pts))


@dataclass(frozen=True)
class Gesture:
    skeleton: Skeleton
    vertex_map: Mapping[str, Point3] = field(default_factory=dict)
    arrow_map: Mapping[str, SampledCurve] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", {k: as_point(v) for k, v in self.vertex_map.items()})
        object.__setattr__(
            self,
            "arrow_map",
            {
                k: v if isinstance(v, SampledCurve) else SampledCurve(tuple(v))
                for k, v in self.arrow_map.items()
            },
        )

    @classmethod
    def build(cls, skeleton: Skeleton, vertex_map: Mapping, curves: Mapping) -> "Gesture":
        """Pin every curve's endpoints to its vertices' images verbatim."""
        vmap = {k: as_point(v) for k, v in vertex_map.items()}
        amap = {}
        for a in skeleton.arrows:
            c = curves[a.id]
            if not isinstance(c, SampledCurve):
                c = SampledCurve.from_array(c)
            amap[a.id] = c.with_endpoints(vmap[a.source], vmap[a.target])
        return cls(skeleton, vmap, amap)

    def sample_counts(self) -> dict[str, int]:
        return {k: len(c) for k, c in self.arrow_map.items()}


def validate_gesture(g: Gesture) -> None:
    validate_skeleton(g.skeleton)
    for v in g.skeleton.vertices:
        if v not in g.vertex_map:
            raise UnmappedElement(f"vertex {v!r} has no image")
    for a in g.skeleton.arrows:
        if a.id not in g.arrow_map:
            raise UnmappedElement(f"arrow {a.id!r} has no curve")
    extra = (set(g.vertex_map) - set(g.skeleton.vertices)) | (
        set(g.arrow_map) - set(g.skeleton.arrow_ids)
    )
    if extra:
        raise UnmappedElement(f"images given for elements not in the skeleton: {sorted(extra)}")
    for a in g.skeleton.arrows:
        c = g.arrow_map[a.id]
        if c.start != g.vertex_map[a.source]:
            raise EndpointMismatch(
                f"arrow {a.id!r} starts at {tuple(c.start)} but {a.source!r} maps to "
                f"{tuple(g.vertex_map[a.source])}"
            )
        if c.end != g.vertex_map[a.target]:
            raise EndpointMismatch(
                f"arrow {a.id!r} ends at {tuple(c.end)} but {a.target!r} maps to "
                f"{tuple(g.vertex_map[a.target])}"
            )


def _concat(curves: Sequence[SampledCurve]) -> SampledCurve:
    pts = list(curves[0].samples)
    for c in curves[1:]:
        pts.extend(c.samples[1:])
    return SampledCurve(tuple(pts))


def close_gesture(g: Gesture, tour: Sequence | None = None) -> list[SampledCurve]:
    """Chain arrow curves head to tail into closed curves.

    ``tour`` is either a flat sequence of arrow ids, split into a new
    component each time the walk returns to its starting vertex, or a
    sequence of such sequences (one per component). ``None`` walks all
    arrows in skeleton order.
    """
    if tour is None:
        tour = g.skeleton.arrow_ids
    tour = list(tour)
    if tour and all(not isinstance(t, str) for t in tour):
        groups = [list(t) for t in tour]
    else:
        groups = [tour]

    out = []
    for group in groups:
        if not group:
            raise NotATour("empty tour")
        start = None
        current = None
        pieces: list[SampledCurve] = []
        for aid in group:
            try:
                a = g.skeleton.arrow(aid)
            except KeyError:
                raise NotATour(f"unknown arrow {aid!r}") from None
            if start is None:
                start, current = a.source, a.source
            if a.source != current:
                raise NotATour(f"arrow {aid!r} leaves {a.source!r}, expected {current!r}")
            pieces.append(g.arrow_map[aid])
            current = a.target
            if current == start:
                out.append(_concat(pieces))
                start, current, pieces = None, None, []
        if pieces:
            raise OpenTour(f"tour ends at {current!r}, not at its start {start!r}")
    return out


# --- braids realised by curves -----------------------------------------------------

def braid_strands(strands: Sequence[SampledCurve], w: BraidWord) -> list[SampledCurve]:
    """Weave parallel strands according to ``w``.

    Letters occupy equal parameter intervals. During letter ``sigma_i`` the two
    strands in positions ``i`` and ``i+1`` slide across to each other's
    curve while the over-strand rises and the under-strand sinks in z,
    ``BRAID_DEPTH`` apart at the middle of the exchange. Output strand ``j``
    starts where input strand ``j`` starts and ends where input strand
    ``perm(w)(j)`` ends. A letter needs a few samples to be visible, so use
    at least ~4 samples per letter.
    """
    if len(strands) != w.strands:
        raise StrandCountMismatch(f"{len(strands)} strands for a braid on {w.strands}")
    counts = {len(s) for s in strands}
    if len(counts) != 1:
        raise SampleCountMismatch(f"strands must be parallel (equal sample counts), got {sorted(counts)}")
    if not w.letters:
        return list(strands)
    n_samples = counts.pop()
    C = np.stack([s.array for s in strands])  # (slots, samples, 3)
    m = len(w.letters)
    t = np.linspace(0.0, 1.0, n_samples)
    out = np.empty_like(C)
    # slot of each strand at the start of every letter
    slot = list(range(w.strands))
    slots_before = []
    for i, _ in w.letters:
        slots_before.append(list(slot))
        pa, pb = i - 1, i
        for j in range(w.strands):
            if slot[j] == pa:
                slot[j] = pb
            elif slot[j] == pb:
                slot[j] = pa
    for k in range(n_samples):
        ell = min(int(t[k] * m), m - 1)
        lam = t[k] * m - ell
        i, s = w.letters[ell]
        pa, pb = i - 1, i
        over_slot = pa if s > 0 else pb
        for j in range(w.strands):
            p = slots_before[ell][j]
            if p not in (pa, pb):
                out[j, k] = C[p, k]
                continue
            q = pb if p == pa else pa
            pt = (1.0 - lam) * C[p, k] + lam * C[q, k]
            bump = 0.5 * BRAID_DEPTH * math.sin(math.pi * lam)
            pt[2] += bump if p == over_slot else -bump
            out[j, k] = pt
    perm = permutation(w)
    result = []
    for j in range(w.strands):
        pts = [as_point(p) for p in out[j]]
        pts[0] = strands[j].samples[0]
        pts[-1] = strands[perm(j + 1) - 1].samples[-1]
        result.append(SampledCurve(tuple(pts)))
    return result


def parallel_strands(n: int, samples: int = 64, spacing: float = 1.0, length: float = 1.0) -> list[SampledCurve]:
    """Straight strands along +y at ``x = 0, spacing, 2*spacing, ...``."""
    return [
        SampledCurve.segment((p * spacing, 0.0, 0.0), (p * spacing, length, 0.0), samples)
        for p in range(n)
    ]


def braid_closure_curves(
    braided: Sequence[SampledCurve],
    w: BraidWord,
    gap: float = 1.0,
    leg_samples: int = 8,
) -> list[SampledCurve]:
    """Close woven strands (running along +y, slots ordered by x) into loops.

    The return arc for slot ``p`` leaves the top, runs right beyond every
    strand, down, and back in under the bottom; arcs are nested with slot 0
    outermost, so they cross neither each other nor the braid.
    """
    n = w.strands
    perm = permutation(w)
    bottoms = [braided[j].samples[0] for j in range(n)]
    tops = [None] * n
    for j in range(n):
        tops[perm(j + 1) - 1] = braided[j].samples[-1]
    xmax = max(max(p.x for p in c.samples) for c in braided)
    ytop = max(p.y for p in tops)
    ybot = min(p.y for p in bottoms)

    def arc(slot):
        top, bot = tops[slot], bottoms[slot]
        c = (n - slot) * gap
        corners = [
            np.array(top),
            np.array([top.x, ytop + c, top.z]),
            np.array([xmax + c, ytop + c, top.z]),
            np.array([xmax + c, ybot - c, bot.z]),
            np.array([bot.x, ybot - c, bot.z]),
            np.array(bot),
        ]
        pts = [top]
        for a, b in zip(corners[:-1], corners[1:]):
            for k in range(1, leg_samples + 1):
                pts.append(as_point(a + (b - a) * (k / leg_samples)))
        pts[-1] = bot
        return SampledCurve(tuple(pts))

    out = []
    seen = set()
    for start in range(n):
        if start in seen:
            continue
        pieces = []
        j = start
        while j not in seen:
            seen.add(j)
            pieces.append(braided[j])
            j = perm(j + 1) - 1
            pieces.append(arc(j))
        out.append(_concat(pieces))
    return out


# --- persistence ---------------------------------------------------------------------

def _num(x: float) -> str:
    return json.dumps(float(x))


def _point(p) -> str:
    return "[" + ", ".join(_num(c) for c in p) + "]"


def gesture_to_dict(g: Gesture) -> dict:
    return {
        "skeleton": skeleton_to_dict(g.skeleton),
        "vertex_map": {k: list(v) for k, v in g.vertex_map.items()},
        "arrow_map": {k: [list(p) for p in c.samples] for k, c in g.arrow_map.items()},
    }


def skeleton_to_dict(s: Skeleton) -> dict:
    return {
        "vertices": list(s.vertices),
        "arrows": [{"id": a.id, "from": a.source, "to": a.target} for a in s.arrows],
    }


def _body_lines(g: Gesture, indent: str) -> list[str]:
    lines = [f'{indent}"vertex_map": {{']
    items = list(g.vertex_map.items())
    for n, (k, v) in enumerate(items):
        comma = "," if n < len(items) - 1 else ""
        lines.append(f"{indent}  {json.dumps(k)}: {_point(v)}{comma}")
    lines.append(f"{indent}}},")
    lines.append(f'{indent}"arrow_map": {{')
    arrows = list(g.arrow_map.items())
    for n, (k, c) in enumerate(arrows):
        lines.append(f"{indent}  {json.dumps(k)}: [")
        for m, p in enumerate(c.samples):
            comma = "," if m < len(c.samples) - 1 else ""
            lines.append(f"{indent}    {_point(p)}{comma}")
        lines.append(f"{indent}  ]" + ("," if n < len(arrows) - 1 else ""))
    lines.append(f"{indent}}}")
    return lines


def _skeleton_lines(s: Skeleton, indent: str) -> list[str]:
    lines = [f'{indent}"skeleton": {{', f'{indent}  "vertices": {json.dumps(list(s.vertices))},']
    lines.append(f'{indent}  "arrows": [')
    for n, a in enumerate(s.arrows):
        comma = "," if n < len(s.arrows) - 1 else ""
        entry = json.dumps({"id": a.id, "from": a.source, "to": a.target})
        lines.append(f"{indent}    {entry}{comma}")
    lines.append(f"{indent}  ]")
    lines.append(f"{indent}}},")
    return lines


def save_gesture(g: Gesture) -> str:
    """Serialise to the JSON gesture document, one sample per line."""
    lines = ["{"] + _skeleton_lines(g.skeleton, "  ") + _body_lines(g, "  ") + ["}"]
    return "\n".join(lines) + "\n"


def parse_json(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None


def _reject_constant(name):
    raise SchemaError(f"non-finite number {name} is not allowed")


def _require(obj, key, where, kind):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object", field=where)
    if key not in obj:
        raise SchemaError(f"missing field {key!r} in {where}", field=key)
    val = obj[key]
    if not isinstance(val, kind):
        raise SchemaError(f"field {key!r} in {where} has the wrong type", field=key)
    return val


def _as_coords(value, where) -> Point3:
    if (
        not isinstance(value, list)
        or len(value) != 3
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in value)
    ):
        raise SchemaError(f"{where} must be a list of three numbers", field=where)
    return as_point(value)


def skeleton_from_dict(doc) -> Skeleton:
    sk = _require(doc, "skeleton", "document", dict)
    vertices = _require(sk, "vertices", "skeleton", list)
    arrows_raw = _require(sk, "arrows", "skeleton", list)
    if not all(isinstance(v, str) for v in vertices):
        raise SchemaError("vertex ids must be strings", field="vertices")
    arrows = []
    for n, a in enumerate(arrows_raw):
        where = f"skeleton.arrows[{n}]"
        arrows.append(
            Arrow(_require(a, "id", where, str), _require(a, "from", where, str), _require(a, "to", where, str))
        )
    return Skeleton(tuple(vertices), tuple(arrows))


def body_from_dict(doc, skeleton: Skeleton, where: str = "document") -> Gesture:
    vm = _require(doc, "vertex_map", where, dict)
    am = _require(doc, "arrow_map", where, dict)
    vertex_map = {k: _as_coords(v, f"vertex_map[{k!r}]") for k, v in vm.items()}
    arrow_map = {}
    for k, pts in am.items():
        if not isinstance(pts, list) or len(pts) < 2:
            raise SchemaError(f"arrow_map[{k!r}] must list at least two samples", field="arrow_map")
        arrow_map[k] = SampledCurve(tuple(_as_coords(p, f"arrow_map[{k!r}]") for p in pts))
    return Gesture(skeleton, vertex_map, arrow_map)


def gesture_from_dict(doc) -> Gesture:
    return body_from_dict(doc, skeleton_from_dict(doc))


def load_gesture(text: str, validate: bool = True) -> Gesture:
    g = gesture_from_dict(parse_json(text))
    if validate:
        validate_gesture(g)
    return g
