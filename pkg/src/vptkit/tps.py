"""Truncated power series in one variable.

Coefficients are mpmath numbers, or exact rationals when every input is an
``int`` or ``Fraction``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def _sum(terms: list):
    return sum(terms, Fraction(0)) if _exact(*terms) else mp.fsum(terms)


def _to_mp(c):
    if isinstance(c, Fraction):
        return mp.mpf(c.numerator) / c.denominator
    return mp.mpmathify(c)


def _coerce(c):
    return Fraction(c) if _exact(c) else _to_mp(c)


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series ``sum_k coeffs[k] x**k`` known through ``x**order``."""

    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> "TruncatedSeries":
        zero = Fraction(0) if _exact(c) else mp.mpf(0)
        return cls((_coerce(c),) + (zero,) * order)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        cs = [mp.mpf(0)] * (order + 1)
        if order >= 1:
            cs[1] = mp.mpf(1)
        return cls(tuple(cs))

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self.order)

    def __add__(self, other):
        o = self._lift(other)
        n = min(self.order, o.order)
        return TruncatedSeries(tuple(self.coeffs[k] + o.coeffs[k] for k in range(n + 1)))

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            if _exact(other, *self.coeffs):
                return TruncatedSeries(tuple(Fraction(other) * a for a in self.coeffs))
            c = _to_mp(other)
            return TruncatedSeries(tuple(c * _to_mp(a) for a in self.coeffs))
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        if not (_exact(*a) and _exact(*b)):
            a, b = [_to_mp(x) for x in a], [_to_mp(x) for x in b]
        return TruncatedSeries(tuple(_sum([a[i] * b[k - i] for i in range(k + 1)]) for k in range(n + 1)))

    __rmul__ = __mul__

    def power(self, alpha) -> "TruncatedSeries":
        """``self**alpha`` for real or complex ``alpha``; needs a nonzero constant term.

        Stays exact for rational coefficients when ``alpha`` is an integer, or
        a rational with constant term 1.
        """
        f = self.coeffs
        if f[0] == 0:
            raise ZeroDivisionError("power of a series with zero constant term")
        exact = _exact(alpha, *f) and (Fraction(alpha).denominator == 1 or f[0] == 1)
        if exact:
            alpha = Fraction(alpha)
            h = [Fraction(f[0]) ** int(alpha) if alpha.denominator == 1 else Fraction(1)]
        else:
            alpha = _to_mp(alpha)
            f = [_to_mp(c) for c in f]
            h = [mp.power(f[0], alpha)]
        for n in range(1, len(f)):
            s = _sum([(alpha * k - n + k) * f[k] * h[n - k] for k in range(1, n + 1)])
            h.append(s / (n * f[0]))
        return TruncatedSeries(tuple(h))

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc
