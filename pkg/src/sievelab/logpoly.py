"""
Exact arithmetic in Q[log 2, log 3, log 5, ...].

Every sieve sum built from h(d), g(p) and log(Delta/d) is a polynomial in
the logarithms of primes with rational coefficients. Keeping it in that
form makes identities such as K(Delta) = K(w^2) + K(w^2, Delta), or the
equality of the two expressions for W, checkable bit for bit. Numbers come
out only through `evaluate`, which uses mpmath at 113 bits by default.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Tuple, Union

import mpmath

from .arith import factorize

Monomial = Tuple[int, ...]  # sorted primes, repeated for powers
Scalar = Union[int, Fraction]

EXACT_PREC = 113


@lru_cache(maxsize=None)
def _log_prime(p: int, prec: int) -> mpmath.mpf:
    with mpmath.workprec(prec + 16):
        return +mpmath.log(p)


class LogPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Monomial, Fraction] | None = None):
        self.terms: Dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    @classmethod
    def const(cls, c: Scalar) -> "LogPoly":
        return cls({(): Fraction(c)})

    @classmethod
    def log(cls, num: int, den: int = 1) -> "LogPoly":
        """log(num / den) for positive integers."""
        out: Dict[Monomial, Fraction] = {}
        for p, e in factorize(num).prime_powers:
            out[(p,)] = out.get((p,), Fraction(0)) + e
        if den != 1:
            for p, e in factorize(den).prime_powers:
                out[(p,)] = out.get((p,), Fraction(0)) - e
        return cls(out)

    def __add__(self, other):
        if not isinstance(other, LogPoly):
            other = LogPoly.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return LogPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LogPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LogPoly):
            other = LogPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LogPoly):
            c = Fraction(other)
            if not c:
                return LogPoly()
            return LogPoly._raw({m: v * c for m, v in self.terms.items()})
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(sorted(m1 + m2))
                out[m] = out.get(m, 0) + c1 * c2
        return LogPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LogPoly.const(other)
        if not isinstance(other, LogPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "LogPoly(0)"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(f"log{p}" for p in m) or "1"
            parts.append(f"{c}*{mono}")
        return "LogPoly(" + " + ".join(parts) + ")"

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def evaluate(self, prec: int = EXACT_PREC) -> mpmath.mpf:
        with mpmath.workprec(prec):
            total = mpmath.mpf(0)
            for m, c in self.terms.items():
                t = mpmath.mpf(c.numerator) / c.denominator
                for p in m:
                    t *= _log_prime(p, prec)
                total += t
            return +total

    def __float__(self):
        return float(self.evaluate())


def lsum(items: Iterable[LogPoly]) -> LogPoly:
    out: Dict[Monomial, Fraction] = {}
    for it in items:
        for m, c in it.terms.items():
            out[m] = out.get(m, 0) + c
    return LogPoly(out)


class LogFraction:
    """num / den with LogPoly parts; equality by cross multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: LogPoly, den: LogPoly):
        if not den:
            raise ZeroDivisionError("LogFraction with zero denominator")
        self.num = num
        self.den = den

    def __eq__(self, other):
        if isinstance(other, LogFraction):
            return self.num * other.den == other.num * self.den
        if isinstance(other, (int, Fraction)):
            other = LogPoly.const(other)
        if not isinstance(other, LogPoly):
            return NotImplemented
        return self.num == other * self.den

    def __hash__(self):
        return hash(float(self))

    def evaluate(self, prec: int = EXACT_PREC) -> mpmath.mpf:
        with mpmath.workprec(prec):
            return self.num.evaluate(prec) / self.den.evaluate(prec)

    def __float__(self):
        return float(self.evaluate())

    def __repr__(self):
        return f"LogFraction({float(self):.12g})"
