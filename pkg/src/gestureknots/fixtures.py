"""Ready-made gestures used by the tests, the CLI and the README examples."""
from __future__ import annotations

import math

import numpy as np

from .skeleton import Arrow, Gesture, SampledCurve, Skeleton


def _bezier(p0, p1, p2, n):
    t = np.linspace(0.0, 1.0, n)[:, None]
    p0, p1, p2 = (np.asarray(p, float) for p in (p0, p1, p2))
    return (1 - t) ** 2 * p0 + 2 * t * (1 - t) * p1 + t**2 * p2


def minimal_gesture() -> Gesture:
    """Point-arrow-point: one straight arrow from the origin to (1, 0, 0)."""
    sk = Skeleton(("v1", "v2"), (Arrow("a1", "v1", "v2"),))
    return Gesture.build(
        sk,
        {"v1": (0.0, 0.0, 0.0), "v2": (1.0, 0.0, 0.0)},
        {"a1": SampledCurve.segment((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 2)},
    )


def segment_gesture(start, end, samples: int = 2) -> Gesture:
    sk = Skeleton(("v1", "v2"), (Arrow("a1", "v1", "v2"),))
    return Gesture.build(sk, {"v1": start, "v2": end}, {"a1": SampledCurve.segment(start, end, samples)})


def branched_skeleton() -> Skeleton:
    """One source vertex with two outgoing arrows."""
    return Skeleton(("s", "t1", "t2"), (Arrow("a1", "s", "t1"), Arrow("a2", "s", "t2")))


def conducting_gesture(samples: int = 50) -> Gesture:
    """Four-beat conducting pattern on a 4-cycle skeleton.

    Beats: 1 bottom, 2 left, 3 right, 4 top. The downbeat stroke (4 -> 1)
    is crossed twice, by the rebound towards beat 2 and by the sweep from
    2 to 3. The downbeat is lifted slightly in z over its middle, so it
    passes over both self-overlaps.
    """
    beats = {
        "b1": (0.0, 0.0, 0.0),
        "b2": (-1.0, 0.3, 0.0),
        "b3": (1.0, 0.3, 0.0),
        "b4": (0.0, 1.0, 0.0),
    }
    sk = Skeleton(
        ("b1", "b2", "b3", "b4"),
        (
            Arrow("down", "b4", "b1"),
            Arrow("left", "b1", "b2"),
            Arrow("right", "b2", "b3"),
            Arrow("up", "b3", "b4"),
        ),
    )
    t = np.linspace(0.0, 1.0, samples)
    down = np.stack([np.zeros_like(t), 1.0 - t, 0.1 * np.sin(np.pi * t)], axis=1)
    curves = {
        "down": down,
        "left": _bezier(beats["b1"], (0.4, 0.6, 0.0), beats["b2"], samples),
        "right": _bezier(beats["b2"], (0.0, 0.8, 0.0), beats["b3"], samples),
        "up": _bezier(beats["b3"], (1.0, 1.0, 0.0), beats["b4"], samples),
    }
    return Gesture.build(sk, beats, curves)


def _three_point_skeleton() -> Skeleton:
    return Skeleton(
        ("p1", "p2", "p3"),
        (Arrow("a1", "p1", "p2"), Arrow("a2", "p2", "p3"), Arrow("a3", "p3", "p1")),
    )


def _split_closed(fn, samples_per_arrow: int) -> Gesture:
    sk = _three_point_skeleton()
    cuts = [0.0, 2 * math.pi / 3, 4 * math.pi / 3, 2 * math.pi]
    verts = {f"p{k + 1}": tuple(fn(np.array([cuts[k]]))[0]) for k in range(3)}
    curves = {}
    for k in range(3):
        s = np.linspace(cuts[k], cuts[k + 1], samples_per_arrow)
        curves[f"a{k + 1}"] = fn(s)
    return Gesture.build(sk, verts, curves)


def round_gesture(samples_per_arrow: int = 60) -> Gesture:
    """Three-point cyclic skeleton with a planar circle as body."""
    return _split_closed(
        lambda s: np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], axis=1), samples_per_arrow
    )


def trefoil_curve(s: np.ndarray, mirror: bool = False) -> np.ndarray:
    """Torus-knot parametrisation ``(2 + cos 3s)(cos 2s, sin 2s), z = sin 3s``."""
    r = 2.0 + np.cos(3 * s)
    z = np.sin(3 * s)
    return np.stack([r * np.cos(2 * s), r * np.sin(2 * s), -z if mirror else z], axis=1)


def trefoil_gesture(samples_per_arrow: int = 150, mirror: bool = False) -> Gesture:
    """Three-point cyclic skeleton whose body closes up into a trefoil."""
    return _split_closed(lambda s: trefoil_curve(s, mirror), samples_per_arrow)


def two_hands_gesture(samples: int = 120, linked: bool = True) -> Gesture:
    """Two self-loops, one per hand; linked once (Hopf-style) by default.

    Hand 1 traces the unit circle in the xy-plane. Hand 2 traces an ellipse
    around (1, 0) tilted up in z; when ``linked`` it threads hand 1's disc
    once, otherwise it is shifted clear of it.
    """
    s = np.linspace(0.0, 2 * math.pi, samples)
    h1 = np.stack([np.cos(s), np.sin(s), np.zeros_like(s)], axis=1)
    shift = 1.0 if linked else 3.5
    h2 = np.stack([shift + np.cos(s + math.pi / 7), 0.3 * np.sin(s + math.pi / 7), np.sin(s + math.pi / 7)], axis=1)
    sk = Skeleton(("left", "right"), (Arrow("l", "left", "left"), Arrow("r", "right", "right")))
    verts = {"left": tuple(h1[0]), "right": tuple(h2[0])}
    return Gesture.build(sk, verts, {"l": h1, "r": h2})
