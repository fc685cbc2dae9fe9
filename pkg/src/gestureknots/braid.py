"""Braid words in the Artin presentation.

Sign convention: the positive letter ``sigma_i`` is the crossing where the
strand in position ``i`` passes OVER the strand in position ``i + 1``
(strands drawn travelling upward, positions numbered left to right).
With this choice the closure of ``sigma_1^2`` is the positive Hopf link,
linking number +1.

Only free reduction (cancelling ``sigma_i sigma_i^-1``) is provided; the
braid relations are not applied.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GeneratorOutOfRange, ParseError

Letter = tuple[int, int]  # (generator index i >= 1, sign +1/-1)


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.strands < 1:
            raise ValueError("a braid needs at least one strand")
        letters = tuple((int(i), int(s)) for i, s in self.letters)
        for i, s in letters:
            if s not in (1, -1):
                raise ValueError(f"letter sign must be +1 or -1, got {s}")
            if not 1 <= i <= self.strands - 1:
                raise GeneratorOutOfRange(
                    f"generator {i} out of range for B{self.strands} (1..{self.strands - 1})"
                )
        object.__setattr__(self, "letters", letters)

    @classmethod
    def from_ints(cls, strands: int, ints: Iterable[int]) -> "BraidWord":
        """``[1, -2]`` -> sigma_1 sigma_2^-1."""
        letters = []
        for k in ints:
            if k == 0:
                raise GeneratorOutOfRange("generator 0 does not exist")
            letters.append((abs(k), 1 if k > 0 else -1))
        return cls(strands, tuple(letters))

    def to_ints(self) -> list[int]:
        return [i * s for i, s in self.letters]

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if not isinstance(other, BraidWord):
            return NotImplemented
        n = max(self.strands, other.strands)
        return BraidWord(n, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((i, -s) for i, s in reversed(self.letters)))

    def mirror(self) -> "BraidWord":
        """Flip every crossing sign (the closure becomes the mirror image)."""
        return BraidWord(self.strands, tuple((i, -s) for i, s in self.letters))

    def stabilize(self, sign: int = 1) -> "BraidWord":
        """Markov stabilisation: embed in B(n+1) and append sigma_n^(+-1)."""
        return BraidWord(self.strands + 1, self.letters + ((self.strands, sign),))

    def format(self) -> str:
        body = " ".join(str(k) for k in self.to_ints())
        return f"B{self.strands}: {body}".rstrip()

    def __str__(self):
        return self.format()


_HEADER = re.compile(r"\s*B(\d+)\s*:")


def parse_braid(text: str) -> BraidWord:
    """Parse ``B<n>: i1 i2 ...`` where each ``ij`` is a nonzero signed integer.

    >>> parse_braid("B3: 1 -2").letters
    ((1, 1), (2, -1))
    """
    m = _HEADER.match(text)
    if not m:
        raise ParseError("expected header 'B<n>:'", line=1, column=1)
    n = int(m.group(1))
    if n < 1:
        raise ParseError("strand count must be at least 1", line=1, column=m.start(1) + 1)
    ints = []
    for tok in re.finditer(r"\S+", text[m.end():]):
        try:
            k = int(tok.group())
        except ValueError:
            col = m.end() + tok.start() + 1
            raise ParseError(f"not a signed integer: {tok.group()!r}", line=1, column=col) from None
        if k == 0 or abs(k) >= n:
            raise GeneratorOutOfRange(
                f"generator {k} out of range for B{n} (allowed +-1..+-{n - 1})"
            )
        ints.append(k)
    return BraidWord.from_ints(n, ints)


@dataclass(frozen=True)
class Permutation:
    """Bijection on positions ``1..n``; ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(x) for x in self.images)
        if sorted(images) != list(range(1, len(images) + 1)):
            raise ValueError(f"not a bijection on 1..{len(images)}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, first: "Permutation") -> "Permutation":
        """``self o first``: apply ``first``, then ``self``."""
        if first.size != self.size:
            raise ValueError("size mismatch")
        return Permutation(tuple(self(first(i)) for i in range(1, self.size + 1)))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.size + 1):
            if start in seen:
                continue
            cyc = []
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return out

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.size + 1))

    def format_cycles(self) -> str:
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial)


def permutation(w: BraidWord) -> Permutation:
    """Where each strand ends up: position ``i`` at the bottom goes to ``perm(i)`` at the top.

    Letters act as adjacent transpositions in reading order, so
    ``permutation(u * v) == permutation(v).compose(permutation(u))``.
    """
    # slot[p] = starting position of the strand currently at position p
    slot = list(range(w.strands + 1))
    for i, _ in w.letters:
        slot[i], slot[i + 1] = slot[i + 1], slot[i]
    images = [0] * w.strands
    for pos in range(1, w.strands + 1):
        images[slot[pos] - 1] = pos
    return Permutation(tuple(images))


def free_reduce(w: BraidWord) -> BraidWord:
    stack: list[Letter] = []
    for i, s in w.letters:
        if stack and stack[-1] == (i, -s):
            stack.pop()
        else:
            stack.append((i, s))
    return BraidWord(w.strands, tuple(stack))


def writhe(w: BraidWord) -> int:
    return sum(s for _, s in w.letters)


def closure_components(w: BraidWord) -> int:
    return len(permutation(w).cycles())


def closure_diagram(w: BraidWord):
    """Planar diagram of the braid closure, one crossing per letter.

    Edges are numbered from 1. The strand sitting in position ``p`` at the
    bottom starts on edge ``p``; each crossing creates two fresh outgoing
    edges and the top of position ``p`` is glued back onto edge ``p``.
    """
    from .knot import Crossing, LinkDiagram

    n = w.strands
    current = list(range(n + 1))  # current[p] = edge id at position p (index 0 unused)
    next_edge = n + 1
    raw = []
    for k, (i, s) in enumerate(w.letters):
        x, y = current[i], current[i + 1]
        x_out, y_out = next_edge, next_edge + 1
        next_edge += 2
        # strand from position i moves to i+1 and vice versa
        if s > 0:
            # strand i is over; under strand enters bottom-right (y), leaves top-left
            edges = (y, x_out, y_out, x)
        else:
            # strand i+1 is over; under strand enters bottom-left (x), leaves top-right
            edges = (x, y, x_out, y_out)
        raw.append((k, edges, s))
        current[i], current[i + 1] = y_out, x_out

    glue = {current[p]: p for p in range(1, n + 1) if current[p] != p}
    crossings = [Crossing(k, tuple(glue.get(e, e) for e in edges), s) for k, edges, s in raw]

    used = sorted({e for c in crossings for e in c.edges})
    free = [p for p in range(1, n + 1) if current[p] == p]
    return LinkDiagram.build(crossings, extra_edges=free, edge_order=used + free)


def random_word(rng, max_strands: int = 4, max_letters: int = 8, min_strands: int = 2) -> BraidWord:
    """Random word for property checks; ``rng`` is a ``random.Random``."""
    n = rng.randint(min_strands, max_strands)
    length = rng.randint(0, max_letters)
    letters = tuple((rng.randint(1, n - 1), rng.choice((1, -1))) for _ in range(length))
    return BraidWord(n, letters)


def concatenate(words: Sequence[BraidWord]) -> BraidWord:
    out = BraidWord(max(w.strands for w in words), ())
    for w in words:
        out = out * w
    return out
