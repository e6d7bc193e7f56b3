"""Variational functions ``W(K) = sum_l c_l K**l [1-1]^{-ql/2}_{top-l}``.

Every field-theory application ends in this form after the square-root
substitution: the strong-coupling limit of a series with vanishing leading
power becomes a Laurent polynomial in the scale ``K``, and the optimum is an
extremum, a turning point or a vanishing extremum of that polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath as mp

from .. import roots as R
from ..series import to_mp


class NoStationaryPointError(ArithmeticError):
    """Neither an extremum nor a turning point exists on ``K > 0``."""


def replacement_poly(l: int, k: int) -> list:
    """``[1-1]^{-ql/2}_k`` as exact ascending coefficients in ``q``.

    ``(-1)**k C(-ql/2 - 1, k)`` equals ``prod_{i<k} (1 + i + l q/2) / k!``.
    """
    poly = [Fraction(1)]
    b = Fraction(l, 2)
    for i in range(k):
        old = poly + [Fraction(0)]
        poly = [(1 + i) * old[0]] + [(1 + i) * old[j] + b * old[j - 1] for j in range(1, len(old))]
    return [x / factorial(k) for x in poly]


def _peval(poly, q):
    acc = 0
    for c in reversed(poly):
        acc = acc * q + c
    return acc


def wk_coeffs(coeffs: dict, top: int, q) -> dict:
    """Coefficients of ``K**l`` after the replacement, for ``l <= top``."""
    if isinstance(q, (int, Fraction)) and all(isinstance(c, (int, Fraction)) for c in coeffs.values()):
        return {l: c * _peval(replacement_poly(l, top - l), Fraction(q))
                for l, c in coeffs.items() if l <= top}
    q = mp.mpmathify(q) if not isinstance(q, Fraction) else to_mp(q)
    return {l: to_mp(c) * _peval([to_mp(x) for x in replacement_poly(l, top - l)], q)
            for l, c in coeffs.items() if l <= top}


def wk_value(wc: dict, K):
    return sum(c * K**l for l, c in wc.items())


def wk_derivative(wc: dict, order: int = 1) -> dict:
    out = {}
    for l, c in wc.items():
        fac = 1
        for i in range(order):
            fac *= l - i
        if fac:
            out[l - order] = c * fac
    return out


def stationary_points(wc: dict, order: int = 1, *, real_only: bool = True) -> list:
    """Zeros of the ``order``-th derivative in ``K``, positive reals first.

    The Laurent polynomial is multiplied by the smallest power of ``K`` that
    clears negative exponents and handed to the polynomial root finder.
    """
    d = wk_derivative(wc, order)
    if not d:
        return []
    poly, _ = _as_poly(d)
    while poly and poly[0] == 0:
        poly.pop(0)
    if len(poly) < 2:
        return []
    rts = [mp.mpc(z) for z in R.all_roots(poly)]
    eps = mp.mpf(2) ** (-mp.mp.prec // 2)
    if real_only:
        return sorted(z.real for z in rts if abs(z.imag) <= eps * abs(z) and z.real > 0)
    return rts


@dataclass(frozen=True)
class Optimum:
    K: object
    W: object
    kind: str            # "extremum" or "turning-point"


def optimize(wc: dict, prefer: str = "extremum") -> Optimum:
    """Optimal ``W``: the extremum, or the turning point if none exists.

    With several extrema the one with the smallest ``|W''|`` (flattest) wins.
    """
    orders = (1, 2) if prefer == "extremum" else (2,)
    for order in orders:
        ks = stationary_points(wc, order)
        if ks:
            curv = wk_derivative(wc, 2 if order == 1 else 3)
            K = min(ks, key=lambda k: (abs(wk_value(curv, k)), k))
            return Optimum(K, wk_value(wc, K), "extremum" if order == 1 else "turning-point")
    samples = {mp.nstr(k, 3): mp.nstr(wk_value(wc, k), 6) for k in (0.1, 0.5, 1, 2, 5)}
    raise NoStationaryPointError(f"no extremum or turning point; W samples {samples}")


def _as_poly(wc: dict) -> tuple:
    """Ascending polynomial ``K**shift * W`` and the shift."""
    shift = -min(min(wc), 0)
    poly = [0] * (max(wc) + shift + 1)
    for l, c in wc.items():
        poly[l + shift] = c
    return poly, shift


def _discriminant(poly: list):
    """Resultant of ``P`` and ``P'`` (Sylvester determinant, up to a constant)."""
    d = len(poly) - 1
    dp = [k * poly[k] for k in range(1, d + 1)]
    a, b = poly[::-1], dp[::-1]
    n = 2 * d - 1
    S = mp.matrix(n, n)
    for i in range(d - 1):
        for j, c in enumerate(a):
            S[i, i + j] = c
    for i in range(d):
        for j, c in enumerate(b):
            S[d - 1 + i, i + j] = c
    return mp.det(S)


@dataclass(frozen=True)
class VanishingExtremum:
    q: object
    K: object
    residual: object


def vanishing_extrema(coeffs: dict, top: int) -> list:
    """All ``(q, K)`` where ``W`` and ``dW/dK`` vanish together.

    The discriminant of ``K**shift W`` in ``K`` is a polynomial in ``q``. It is
    recovered exactly from samples on a circle by an inverse DFT, and its
    roots are the candidate ``q``. For each, ``K`` is the zero of ``dW/dK``
    where ``|W|`` is smallest. Returned ordered by ``|Im q|`` then ``q``.
    """
    nK = len(_as_poly(wk_coeffs(coeffs, top, 1))[0]) - 1
    deg = (2 * nK - 1) * (top + 2)
    M = deg + 1
    samples = [_discriminant(_as_poly(wk_coeffs(coeffs, top, mp.expjpi(mp.mpf(2 * j) / M)))[0])
               for j in range(M)]
    dpoly = [sum(samples[j] * mp.expjpi(-mp.mpf(2 * j * k) / M) for j in range(M)) / M
             for k in range(M)]
    scale = max(abs(c) for c in dpoly)
    tiny = scale * mp.mpf(2) ** (-mp.mp.prec // 2)
    dpoly = [c if abs(c) > tiny else 0 for c in dpoly]
    out = []
    for q in R.all_roots(dpoly):
        q = mp.mpc(q)
        if abs(q.imag) <= mp.mpf(2) ** (-mp.mp.prec // 3) * max(1, abs(q)):
            q = q.real
        wc = wk_coeffs(coeffs, top, q)
        ks = stationary_points(wc, 1, real_only=False)
        if not ks:
            continue
        K = min(ks, key=lambda k: abs(wk_value(wc, k)))
        if abs(mp.im(K)) <= mp.mpf(2) ** (-mp.mp.prec // 3) * abs(K):
            K = mp.re(K)
        out.append(VanishingExtremum(q, K, abs(wk_value(wc, K))))
    return sorted(out, key=lambda v: (abs(mp.im(v.q)), mp.re(v.q)))
