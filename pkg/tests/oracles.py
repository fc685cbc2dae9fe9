"""Independent reference computations used to check the library.

Nothing here imports the code paths under test beyond plain data access.
"""
from fractions import Fraction
from itertools import product

import numpy as np
import sympy as sp
from scipy.optimize import brentq

A, t = sp.symbols("A t")


def bracket_by_tracing(crossings, free_loops=0):
    """Kauffman bracket by enumerating states and walking each loop.

    ``crossings`` is a list of ``(a, b, c, d)`` edge tuples. Each slot
    ``(k, pos)`` is joined to its smoothing partner and, through the edge
    label, to the other slot carrying the same edge; loops are the cycles
    of that 2-regular graph.
    """
    slots_of = {}
    for k, edges in enumerate(crossings):
        for pos, e in enumerate(edges):
            slots_of.setdefault(e, []).append((k, pos))
    across = {}
    for e, slots in slots_of.items():
        assert len(slots) == 2, f"edge {e} used {len(slots)} times"
        s1, s2 = slots
        across[s1] = s2
        across[s2] = s1
    a_partner = {0: 1, 1: 0, 2: 3, 3: 2}
    b_partner = {0: 3, 3: 0, 1: 2, 2: 1}
    delta = -A**2 - A**-2
    total = sp.Integer(0)
    n = len(crossings)
    for choice in product((0, 1), repeat=n):
        seen = set()
        loops = free_loops
        for start in across:
            if start in seen:
                continue
            loops += 1
            cur = start
            while cur not in seen:
                seen.add(cur)
                k, pos = cur
                partner = (k, (b_partner if choice[k] else a_partner)[pos])
                seen.add(partner)
                cur = across[partner]
        a = choice.count(0)
        b = n - a
        total += A ** (a - b) * delta ** (loops - 1)
    return sp.expand(total)


def _a_terms(expr):
    """Laurent polynomial in A -> {exponent: coeff}, via a shifted Poly."""
    shift = 200
    poly = sp.Poly(sp.expand(expr * A**shift), A)
    return {int(k[0]) - shift: int(c) for k, c in poly.terms() if c}


def jones_from_bracket(bracket, writhe):
    """Return ``{Fraction exponent of t: coeff}`` for ``(-A^3)^-w <D>`` at ``A = t^(-1/4)``."""
    f = (-A**3) ** (-writhe) * bracket
    return {Fraction(-k, 4): c for k, c in _a_terms(f).items()}


def bracket_terms(bracket):
    """sympy Laurent polynomial in A -> {exponent: coeff}."""
    return _a_terms(bracket)


def gauss_linking(c1, c2):
    """Discrete Gauss linking integral between two closed polylines.

    Midpoint rule over segment pairs; callers round to the nearest integer.
    """
    p = np.asarray(c1, float)
    q = np.asarray(c2, float)
    dp = np.diff(p, axis=0)
    dq = np.diff(q, axis=0)
    mp = (p[:-1] + p[1:]) / 2
    mq = (q[:-1] + q[1:]) / 2
    r = mp[:, None, :] - mq[None, :, :]
    cross = np.cross(dp[:, None, :], dq[None, :, :])
    num = np.einsum("ijk,ijk->ij", r, cross)
    den = np.linalg.norm(r, axis=2) ** 3
    return float((num / den).sum() / (4 * np.pi))


def sinusoid_crossings(phase_a, phase_b, period, length, grid=20000):
    """Times in [-1/2, length - 1/2) where the two sinusoids agree, by root bracketing."""
    def diff(x):
        return np.sin(2 * np.pi * x / period + phase_a) - np.sin(2 * np.pi * x / period + phase_b)

    xs = np.linspace(-0.5, length - 0.5, grid)
    vals = diff(xs)
    roots = []
    for k in range(len(xs) - 1):
        if vals[k] == 0:
            roots.append(xs[k])
        elif vals[k] * vals[k + 1] < 0:
            roots.append(brentq(diff, xs[k], xs[k + 1], xtol=1e-13))
    return roots
