"""Exact Laurent polynomials in one variable with half-integer exponents.

Exponents are stored doubled, so ``t^(3/2)`` lives under key ``3`` and
``t^-2`` under key ``-4``. Coefficients are Python ints.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


class LaurentPolynomial:
    """Immutable integer Laurent polynomial ``sum c_k * x^(k/2)``.

    >>> p = LaurentPolynomial.from_exponents({-2: 1, 0: -1})
    >>> str(p)
    't^-2 - 1'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            if int(k) != k or int(c) != c:
                raise TypeError("exponent keys and coefficients must be integers")
            if c:
                clean[int(k)] = int(c)
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def from_exponents(cls, terms: Mapping[int | Fraction, int]) -> "LaurentPolynomial":
        """Build from true exponents (ints or halves) instead of doubled keys."""
        doubled = {}
        for e, c in terms.items():
            d = Fraction(e) * 2
            if d.denominator != 1:
                raise ValueError(f"exponent {e} is not a multiple of 1/2")
            doubled[int(d)] = doubled.get(int(d), 0) + c
        return cls(doubled)

    @classmethod
    def monomial(cls, exponent, coeff: int = 1) -> "LaurentPolynomial":
        return cls.from_exponents({exponent: coeff})

    @classmethod
    def constant(cls, c: int) -> "LaurentPolynomial":
        return cls({0: c})

    @property
    def terms(self) -> dict[int, int]:
        """Copy of the doubled-exponent -> coefficient map, sorted ascending."""
        return dict(self._terms)

    def exponents(self) -> list[Fraction]:
        return [Fraction(k, 2) for k in self._terms]

    def coefficient(self, exponent) -> int:
        return self._terms.get(int(Fraction(exponent) * 2), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def has_half_exponents(self) -> bool:
        return any(k % 2 for k in self._terms)

    def __len__(self):
        return len(self._terms)

    # arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentPolynomial):
            return other
        if isinstance(other, int):
            return LaurentPolynomial({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only monomials have negative powers")
            ((k, c),) = self._terms.items()
            if c not in (1, -1):
                raise ValueError("monomial coefficient must be a unit")
            return LaurentPolynomial({k * n: c ** (-n)})
        result = LaurentPolynomial({0: 1})
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale_exponents(self, factor: Fraction | int) -> "LaurentPolynomial":
        """Substitute ``x -> x^factor``; result exponents must stay half-integral."""
        out = {}
        for k, c in self._terms.items():
            nk = Fraction(k) * Fraction(factor)
            if nk.denominator != 1:
                raise ValueError(f"substitution leaves exponent {nk / 2}")
            out[int(nk)] = out.get(int(nk), 0) + c
        return LaurentPolynomial(out)

    def invert_variable(self) -> "LaurentPolynomial":
        """``p(x) -> p(1/x)``."""
        return self.scale_exponents(-1)

    def evaluate(self, x: float) -> float:
        return sum(c * x ** (k / 2) for k, c in self._terms.items())

    # comparison ---------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    # rendering ----------------------------------------------------------

    def format(self, var: str = "t") -> str:
        """Render in ascending exponent order, e.g. ``-t^-4 + t^-3 + t^-1``."""
        if not self._terms:
            return "0"
        parts = []
        for k, c in self._terms.items():
            if k == 0:
                body = str(abs(c))
            else:
                if k == 2:
                    mono = var
                elif k % 2 == 0:
                    mono = f"{var}^{k // 2}"
                else:
                    mono = f"{var}^({k}/2)"
                body = mono if abs(c) == 1 else f"{abs(c)}*{mono}"
            if not parts:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"LaurentPolynomial({self._terms!r})"


def from_terms(pairs: Iterable[tuple[int | Fraction, int]]) -> LaurentPolynomial:
    acc: dict = {}
    for e, c in pairs:
        acc[e] = acc.get(e, 0) + c
    return LaurentPolynomial.from_exponents(acc)
