"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly
(``python tests/test_acceptance.py``) for the bare report.
"""
from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gestureknots import fixtures  # noqa: E402
from gestureknots.braid import BraidWord, closure_diagram, parse_braid, random_word, writhe  # noqa: E402
from gestureknots.cli import main as cli_main  # noqa: E402
from gestureknots.fasta import DnaSequence  # noqa: E402
from gestureknots.homotopy import associator_check, flatten_recursion, linear_hypergesture, random_polyline  # noqa: E402
from gestureknots.knot import Verdict, certify_knotted, jones, linking_number, project_to_diagram  # noqa: E402
from gestureknots.midi import read_smf, write_smf  # noqa: E402
from gestureknots.polynomial import LaurentPolynomial as LP  # noqa: E402
from gestureknots.skeleton import close_gesture  # noqa: E402
from gestureknots.sonify import SonifyOptions, assemble_score, render_dna  # noqa: E402

from oracles import bracket_by_tracing, jones_from_bracket  # noqa: E402

FIGURE_EIGHT = LP.from_exponents({-2: 1, -1: -1, 0: 1, 1: -1, 2: 1})
TREFOILS = (
    LP.from_exponents({1: 1, 3: 1, 4: -1}),
    LP.from_exponents({-4: -1, -3: 1, -1: 1}),
)


def _report(n: int, ok: bool, detail: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")


def check_1():
    import io

    t0 = time.perf_counter()
    out = io.StringIO()
    code = cli_main(["braid", "B3: 1 -2 1 -2"], out)
    reported = out.getvalue().split("jones: ")[1].splitlines()[0]
    w = parse_braid("B3: 1 -2 1 -2")
    d = closure_diagram(w)
    ours = jones(d, writhe(w))
    oracle = LP.from_exponents(jones_from_bracket(bracket_by_tracing([c.edges for c in d.crossings]), writhe(w)))
    elapsed = time.perf_counter() - t0
    ok = (
        code == 0
        and 2 ** d.n_crossings == 16
        and ours == FIGURE_EIGHT == oracle
        and reported == "t^-2 - t^-1 + 1 - t + t^2"
        and elapsed < 1.0
    )
    return ok, f"figure-eight V = {reported}, oracle agrees={ours == oracle}, {elapsed:.3f}s"


def check_2():
    t0 = time.perf_counter()
    results = {}
    for name, g in (
        ("round", fixtures.round_gesture()),
        ("trefoil", fixtures.trefoil_gesture()),
        ("mirror", fixtures.trefoil_gesture(mirror=True)),
    ):
        d, w = project_to_diagram(close_gesture(g))
        results[name] = (jones(d, w), certify_knotted(d, w))
    elapsed = time.perf_counter() - t0
    v_round, c_round = results["round"]
    v_tref, c_tref = results["trefoil"]
    v_mir, c_mir = results["mirror"]
    ok = (
        v_round == 1
        and c_round is Verdict.POSSIBLY_UNKNOT
        and c_tref is Verdict.KNOTTED
        and len(v_tref) == 3
        and v_tref in TREFOILS
        and v_mir == v_tref.invert_variable()
        and c_mir is Verdict.KNOTTED
        and elapsed < 1.0
    )
    return ok, f"round {v_round} / trefoil {v_tref} / mirror {v_mir}, {elapsed:.3f}s"


def check_3():
    t0 = time.perf_counter()
    d, w = project_to_diagram(close_gesture(fixtures.conducting_gesture()))
    v = jones(d, w)
    elapsed = time.perf_counter() - t0
    return v == 1 and elapsed < 1.0, f"conducting pattern V = {v} ({d.n_crossings} crossings), {elapsed:.3f}s"


def check_4():
    t0 = time.perf_counter()
    rng = random.Random(20240401)
    failures = 0
    for _ in range(200):
        w = random_word(rng, max_strands=4, max_letters=8)
        base = jones(closure_diagram(w))
        i = rng.randint(1, w.strands - 1)
        e = rng.choice((1, -1))
        conj = BraidWord(w.strands, ((i, e),) + w.letters + ((i, -e),))
        variants = (w.stabilize(1), w.stabilize(-1), conj)
        failures += sum(jones(closure_diagram(v)) != base for v in variants)
    elapsed = time.perf_counter() - t0
    return failures == 0 and elapsed < 30.0, f"200 words x 3 moves, {failures} mismatches, {elapsed:.2f}s"


def check_5():
    pos = linking_number(closure_diagram(parse_braid("B2: 1 1")), 0, 1)
    neg = linking_number(closure_diagram(parse_braid("B2: -1 -1")), 0, 1)
    return pos == 1 and neg == -1, f"lk(sigma1^2) = {pos:+d}, lk(sigma1^-2) = {neg:+d}"


def check_6():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(100):
        f = random_polyline(rng, (0.0, 0.0, 0.0))
        g = random_polyline(rng, f.end)
        h = random_polyline(rng, g.end)
        _, dev, _ = associator_check(f, g, h, tol=1e-6, samples=1024)
        worst = max(worst, dev)
    elapsed = time.perf_counter() - t0
    return worst <= 1e-6 and elapsed < 10.0, f"max deviation {worst:.2e} over 100 triples, {elapsed:.2f}s"


def check_7():
    t0 = time.perf_counter()
    seq = DnaSequence("acgt", "ACGT")
    r = render_dna(seq)
    widths = tuple(pair[1] - pair[0] for _, _, pair in r.dyads)
    order = "".join(b for _, b, _ in r.dyads)
    period = 16
    expected_unisons = tuple(n for n in range(r.helix.length) if n % (period // 2) == 0)
    data1 = write_smf(r.score)
    data2 = write_smf(assemble_score(DnaSequence("acgt", "ACGT")))
    roundtrip = read_smf(data1) == r.score
    elapsed = time.perf_counter() - t0
    ok = (
        len(r.dyads) == 4
        and widths == (3, 4, 4, 3)
        and order == "ACGT"
        and len(r.glissandi) == 3
        and len(r.helix_voices) == 2
        and r.helix.unison_steps == expected_unisons
        and roundtrip
        and data1 == data2
        and elapsed < 1.0
    )
    return ok, (
        f"widths {widths}, {len(r.glissandi)} glissandi, {len(r.helix_voices)} helix voices, "
        f"unisons {list(r.helix.unison_steps)}, round trip {roundtrip}, identical bytes {data1 == data2}, "
        f"{elapsed:.3f}s"
    )


def check_8():
    seq = DnaSequence("x", "ACGT")
    plain = assemble_score(seq)
    full = assemble_score(seq, options=SonifyOptions(supercoiling=True))
    section = sorted((e for e in full.events if e.onset >= plain.end), key=lambda e: e.onset)
    spans = []
    for e in section:
        if not spans or spans[-1] != e.velocity:
            spans.append(e.velocity)
    peak = spans.index(max(spans)) if spans else 0
    rising = all(a < b for a, b in zip(spans[:peak], spans[1 : peak + 1]))
    falling = all(a > b for a, b in zip(spans[peak:], spans[peak + 1 :]))
    ok = bool(spans) and spans[peak] == 104 and rising and falling and 0 < peak < len(spans) - 1
    return ok, f"per-span velocities {spans}"


def check_9():
    g1 = fixtures.segment_gesture((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), 5)
    g2 = fixtures.segment_gesture((0.3, 2.0, -1.0), (1.0 / 3.0, 5.0, 2.0 / 7.0), 5)
    pairs = flatten_recursion(linear_hypergesture(g1, g2, 7))
    s1, e1 = np.array(g1.vertex_map["v1"]), np.array(g1.vertex_map["v2"])
    s2, e2 = np.array(g2.vertex_map["v1"]), np.array(g2.vertex_map["v2"])

    def dist(p, a, b):
        d = b - a
        lam = min(max(np.dot(np.asarray(p) - a, d) / np.dot(d, d), 0.0), 1.0)
        return float(np.linalg.norm(a + lam * d - np.asarray(p)))

    worst = max(max(dist(s, s1, s2), dist(e, e1, e2)) for s, e in pairs)
    ok = len(pairs) == 7 and worst <= 1e-12
    return ok, f"{len(pairs)} endpoint pairs, max distance to segments {worst:.1e}"


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9]


@pytest.mark.parametrize("n", range(1, len(CHECKS) + 1))
def test_criterion(n, capsys):
    ok, detail = CHECKS[n - 1]()
    with capsys.disabled():
        print()
        _report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k, check in enumerate(CHECKS, start=1):
        ok, detail = check()
        _report(k, ok, detail)
        failed += not ok
    sys.exit(1 if failed else 0)
