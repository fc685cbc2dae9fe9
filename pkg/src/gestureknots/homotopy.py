"""Hypergestures: sampled paths whose points are gestures.

Paths compose by running the first on [0, 1/2] and the second on [1/2, 1].
Grouping three paths two ways gives different parametrisations of the same
trace; the piecewise-linear map ``ASSOCIATOR`` sends one onto the other.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    EndpointMismatch,
    SampleCountMismatch,
    SchemaError,
    SkeletonMismatch,
    WrongSkeleton,
)
from .skeleton import (
    Gesture,
    Point3,
    SampledCurve,
    _body_lines,
    _skeleton_lines,
    as_point,
    body_from_dict,
    parse_json,
    skeleton_from_dict,
    validate_gesture,
)


@dataclass(frozen=True)
class Reparametrization:
    """Monotone piecewise-linear self-map of [0, 1] through ``knots``."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self):
        knots = tuple((float(u), float(v)) for u, v in self.knots)
        if len(knots) < 2 or knots[0] != (0.0, 0.0) or knots[-1] != (1.0, 1.0):
            raise ValueError("knots must start at (0, 0) and end at (1, 1)")
        for (u0, v0), (u1, v1) in zip(knots, knots[1:]):
            if not u1 > u0 or v1 < v0:
                raise ValueError("knots must be strictly increasing in u and monotone in v")
        object.__setattr__(self, "knots", knots)

    def __call__(self, u: float) -> float:
        us = [k[0] for k in self.knots]
        i = min(max(bisect_right(us, u) - 1, 0), len(us) - 2)
        (u0, v0), (u1, v1) = self.knots[i], self.knots[i + 1]
        return v0 + (u - u0) * (v1 - v0) / (u1 - u0)

    def apply(self, us) -> np.ndarray:
        us = np.asarray(us, dtype=float)
        return np.interp(us, [k[0] for k in self.knots], [k[1] for k in self.knots])


# (f.g).h  ->  f.(g.h): 1/4 -> 1/2, 1/2 -> 3/4
ASSOCIATOR = Reparametrization(((0.0, 0.0), (0.25, 0.5), (0.5, 0.75), (1.0, 1.0)))


def _check_chain(f: SampledCurve, g: SampledCurve):
    if f.end != g.start:
        raise EndpointMismatch(f"path ends at {tuple(f.end)} but the next starts at {tuple(g.start)}")


def compose_paths(f: SampledCurve, g: SampledCurve, n_samples: int | None = None) -> SampledCurve:
    """Run ``f`` on [0, 1/2] then ``g`` on [1/2, 1], resampled uniformly.

    The default sample count ``2 * max(len(f), len(g)) - 1`` is odd, so
    parameter 1/2 (the junction) is a sample.
    """
    _check_chain(f, g)
    if n_samples is None:
        n_samples = 2 * max(len(f), len(g)) - 1
    if n_samples < 2:
        raise ValueError("need at least two samples")
    pts = []
    for k in range(n_samples):
        u = k / (n_samples - 1)
        pts.append(f.evaluate(2 * u) if u <= 0.5 else g.evaluate(2 * u - 1))
    pts[0], pts[-1] = f.start, g.end
    return SampledCurve(tuple(pts))


def _path_of(pieces: Sequence[tuple[float, float, SampledCurve]]) -> Callable[[np.ndarray], np.ndarray]:
    """Exact evaluator for a concatenation; ``pieces`` are ``(u0, u1, curve)``."""

    def evaluate(us):
        us = np.asarray(us, dtype=float)
        out = np.empty((len(us), 3))
        for n, (u0, u1, c) in enumerate(pieces):
            last = n == len(pieces) - 1
            mask = (us >= u0) & ((us <= u1) if last else (us < u1))
            out[mask] = c.evaluate_many((us[mask] - u0) / (u1 - u0))
        return out

    return evaluate


def associator_check(
    f: SampledCurve,
    g: SampledCurve,
    h: SampledCurve,
    tol: float = 1e-9,
    samples: int = 1024,
) -> tuple[Reparametrization, float, bool]:
    """Compare ``(f.g).h`` with ``f.(g.h)`` after the associator reparametrisation.

    Both groupings are evaluated directly from the three input curves (no
    intermediate resampling) on a uniform grid of ``samples`` parameters;
    the right grouping is read at ``ASSOCIATOR(u)``. Returns the map, the
    largest pointwise distance and whether it is within ``tol``.
    """
    _check_chain(f, g)
    _check_chain(g, h)
    left = _path_of([(0.0, 0.25, f), (0.25, 0.5, g), (0.5, 1.0, h)])
    right = _path_of([(0.0, 0.5, f), (0.5, 0.75, g), (0.75, 1.0, h)])
    us = np.linspace(0.0, 1.0, samples)
    diff = left(us) - right(ASSOCIATOR.apply(us))
    dev = float(np.max(np.linalg.norm(diff, axis=1)))
    return ASSOCIATOR, dev, dev <= tol


# --- hypergestures ---------------------------------------------------------------

@dataclass(frozen=True)
class Hypergesture:
    steps: tuple[Gesture, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if len(steps) < 2:
            raise ValueError("a hypergesture needs at least two steps")
        first = steps[0]
        for g in steps[1:]:
            _check_compatible(first, g)
        object.__setattr__(self, "steps", steps)

    @property
    def skeleton(self):
        return self.steps[0].skeleton

    def __len__(self):
        return len(self.steps)

    def reversed(self) -> "Hypergesture":
        return Hypergesture(self.steps[::-1])

    def then(self, other: "Hypergesture") -> "Hypergesture":
        """Concatenate, sharing the junction step."""
        if self.steps[-1] != other.steps[0]:
            raise EndpointMismatch("hypergestures do not meet")
        return Hypergesture(self.steps + other.steps[1:])


def _check_compatible(g1: Gesture, g2: Gesture):
    if g1.skeleton != g2.skeleton:
        raise SkeletonMismatch("gestures are over different skeleta")
    if g1.sample_counts() != g2.sample_counts():
        raise SampleCountMismatch(
            f"per-arrow sample counts differ: {g1.sample_counts()} vs {g2.sample_counts()}"
        )


def _lerp_point(p: Point3, q: Point3, lam: float) -> Point3:
    return Point3(p.x + lam * (q.x - p.x), p.y + lam * (q.y - p.y), p.z + lam * (q.z - p.z))


def _lerp_gesture(g1: Gesture, g2: Gesture, lam: float) -> Gesture:
    vm = {v: _lerp_point(g1.vertex_map[v], g2.vertex_map[v], lam) for v in g1.vertex_map}
    am = {}
    for a, c1 in g1.arrow_map.items():
        c2 = g2.arrow_map[a]
        am[a] = SampledCurve(tuple(_lerp_point(p, q, lam) for p, q in zip(c1.samples, c2.samples)))
    return Gesture(g1.skeleton, vm, am)


def linear_hypergesture(g1: Gesture, g2: Gesture, steps: int) -> Hypergesture:
    """Straight-line homotopy sampled at ``steps`` evenly spaced times.

    Step ``k`` is ``g1 + (k / (steps - 1)) * (g2 - g1)`` on every vertex image
    and curve sample; the first and last steps are ``g1`` and ``g2`` themselves.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    _check_compatible(g1, g2)
    out = [g1]
    for k in range(1, steps - 1):
        out.append(_lerp_gesture(g1, g2, k / (steps - 1)))
    out.append(g2)
    return Hypergesture(tuple(out))


def flatten_recursion(h: Hypergesture) -> list[tuple[Point3, Point3]]:
    """Reduce a hypergesture over point-arrow-point to its endpoint pairs."""
    sk = h.skeleton
    if not sk.is_point_arrow_point():
        raise WrongSkeleton("flattening needs the point-arrow-point skeleton")
    a = sk.arrows[0]
    return [(g.vertex_map[a.source], g.vertex_map[a.target]) for g in h.steps]


def swap_pair(g1: Gesture, g2: Gesture, steps: int) -> tuple[Hypergesture, Hypergesture]:
    """Paths ``g1 -> g2`` and back; the second is the first run backwards."""
    p1 = linear_hypergesture(g1, g2, steps)
    return p1, p1.reversed()


def embed_as_point(g: Gesture) -> Hypergesture:
    """The constant path at ``g``."""
    return Hypergesture((g, g))


# --- persistence ---------------------------------------------------------------------

def save_hypergesture(h: Hypergesture) -> str:
    lines = ["{"] + _skeleton_lines(h.skeleton, "  ") + ['  "steps": [']
    for n, g in enumerate(h.steps):
        lines.append("    {")
        lines.extend(_body_lines(g, "      "))
        lines.append("    }" + ("," if n < len(h.steps) - 1 else ""))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def load_hypergesture(text: str) -> Hypergesture:
    doc = parse_json(text)
    sk = skeleton_from_dict(doc)
    raw = doc.get("steps")
    if not isinstance(raw, list):
        raise SchemaError("missing field 'steps' in document", field="steps")
    steps = []
    for n, body in enumerate(raw):
        g = body_from_dict(body, sk, where=f"steps[{n}]")
        validate_gesture(g)
        steps.append(g)
    return Hypergesture(tuple(steps))


def random_polyline(rng: np.random.Generator, start, vertices: int = 5, samples: int = 64) -> SampledCurve:
    """Random polyline from ``start`` through ``vertices - 1`` further corners."""
    corners = [np.asarray(start, float)]
    for _ in range(vertices - 1):
        corners.append(corners[-1] + rng.normal(size=3))
    t = np.linspace(0.0, vertices - 1, samples)
    pts = np.stack([np.interp(t, np.arange(vertices), [c[d] for c in corners]) for d in range(3)], axis=1)
    pts[0] = corners[0]
    return SampledCurve(tuple(as_point(p) for p in pts))
