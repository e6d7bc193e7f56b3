"""Truncated weak-coupling series and the variational re-expansion engine.

The engine turns the partial sum ``sum_l a_l g**l`` of a divergent series into
a function of a trial frequency ``Omega``. The two growth parameters are the
leading strong-coupling power ``p/q`` and the approach exponent
``omega = 2/q``. Optimal ``Omega`` values are zeros of a polynomial in the
combined variable ``sigma = Omega**(q-2) * (Omega**2 - 1) / g``, which does not
depend on ``g``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Callable, Sequence

import mpmath as mp

from .tps import TruncatedSeries

Number = "Fraction | mp.mpf | mp.mpc | int"


def to_fraction(x) -> Fraction:
    """Parse an int, Fraction or ``"n/d"`` string into an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def to_mp(x):
    """Convert ints, Fractions and mpmath numbers to mpmath numbers."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpmathify(x)


def generalized_binomial(x, k: int):
    """Return ``x (x-1) ... (x-k+1) / k!``.

    Exact when ``x`` is a Fraction or int, otherwise evaluated in the type of
    ``x`` (mpmath numbers work).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    exact = isinstance(x, (int, Fraction))
    acc = Fraction(1) if exact else mp.mpf(1)
    for i in range(k):
        acc = acc * (x - i) / (i + 1)
    return acc


def truncated_binomial(r, k: int):
    """Binomial expansion of ``(1 - 1)**r`` truncated after ``k + 1`` terms.

    Uses the closed form ``(-1)**k * C(r - 1, k)``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    return (-1) ** k * generalized_binomial(r - 1, k)


def truncated_binomial_sum(r, k: int):
    """Term-by-term version of :func:`truncated_binomial` (used as an oracle)."""
    return sum((generalized_binomial(r, i) * (-1) ** i for i in range(k + 1)),
               Fraction(0) if isinstance(r, (int, Fraction)) else mp.mpf(0))


@dataclass(frozen=True)
class GrowthParams:
    """Leading strong-coupling power ``p/q`` and approach exponent ``2/q``."""

    p: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", to_fraction(self.p))
        object.__setattr__(self, "q", to_fraction(self.q))
        if self.q <= 0:
            raise ValueError("q must be positive")

    @property
    def omega(self) -> Fraction:
        return 2 / self.q


@dataclass(frozen=True)
class WeakSeries:
    """Coefficients ``a_0 .. a_L`` of a weak-coupling expansion.

    ``coeffs[l]`` multiplies ``g**l``. Entries are Fractions for exact series
    or mpmath numbers for numerically generated ones.
    """

    coeffs: tuple
    coupling_name: str = "g"
    convention_note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if len(self.coeffs) < 1:
            raise ValueError("a series needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs)

    def truncate(self, L: int) -> "WeakSeries":
        if L > self.order:
            raise ValueError(f"order {L} requested, series known to order {self.order}")
        return WeakSeries(self.coeffs[: L + 1], self.coupling_name, self.convention_note)

    def __call__(self, g):
        return sum(c * g**l for l, c in enumerate(self.coeffs))

    def to_json(self, gp: GrowthParams | None = None) -> str:
        if not self.exact:
            raise ValueError("JSON export holds exact rationals only")
        doc = {"coeffs": [str(Fraction(c)) for c in self.coeffs]}
        if gp is not None:
            doc["p"] = str(gp.p)
            doc["q"] = str(gp.q)
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> tuple["WeakSeries", GrowthParams | None]:
        doc = json.loads(text)
        for c in doc["coeffs"]:
            if "." in c or "e" in c.lower():
                raise ValueError(f"coefficient {c!r} is not a rational string")
        series = cls(tuple(Fraction(c) for c in doc["coeffs"]))
        gp = GrowthParams(doc["p"], doc["q"]) if "p" in doc else None
        return series, gp


def _check_order(series: WeakSeries, L: int):
    if L < 0:
        raise ValueError("order must be nonnegative")
    if L > series.order:
        raise ValueError(f"order {L} exceeds available maximum {series.order}")


def reexpand(series: WeakSeries, gp: GrowthParams, L: int) -> list[list]:
    """Re-expanded coefficients ``eps_j(sigma)`` for ``j = 0..L``.

    Returns one ascending coefficient list in ``sigma`` per ``j``:
    ``eps_j(sigma) = sum_l a_l C((p - l q)/2, j - l) (-sigma)**(j - l)``.
    """
    _check_order(series, L)
    a = series.coeffs
    conv = (lambda v: v) if series.exact else to_mp
    out = []
    for j in range(L + 1):
        poly = []
        for m in range(j + 1):
            l = j - m
            poly.append(a[l] * conv(generalized_binomial((gp.p - l * gp.q) / 2, m)) * (-1) ** m)
        out.append(poly)
    return out


def polyval(coeffs: Sequence, x):
    """Evaluate an ascending coefficient list by Horner's rule."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def sigma_of_omega(Omega, g, q):
    """Combined variable ``Omega**(q-2) (Omega**2 - 1) / g``."""
    return Omega ** (q - 2) * (Omega**2 - 1) / g


@lru_cache(maxsize=256)
def _reexpand_mp(coeffs: tuple, p: Fraction, q: Fraction, L: int, prec: int):
    eps = reexpand(WeakSeries(coeffs), GrowthParams(p, q), L)
    return tuple(tuple(to_mp(c) for c in e) for e in eps)


def variational_value(series: WeakSeries, gp: GrowthParams, L: int, g, Omega):
    """Order-``L`` variational approximation at coupling ``g`` and trial ``Omega``."""
    _check_order(series, L)
    if Omega == 0:
        raise ZeroDivisionError("Omega must be nonzero")
    g = to_mp(g)
    Omega = to_mp(Omega)
    p, q = to_mp(gp.p), to_mp(gp.q)
    sigma = sigma_of_omega(Omega, g, q)
    x = g / Omega**q
    eps = _reexpand_mp(series.coeffs, gp.p, gp.q, L, mp.mp.prec)
    total = sum(x**j * polyval(eps[j], sigma) for j in range(L + 1))
    return Omega**p * total


def sigma_polynomial(series: WeakSeries, gp: GrowthParams, L: int) -> list:
    """Ascending coefficients of the optimality polynomial ``P^(L)(sigma)``.

    ``dZ_var/dOmega = Omega**(p-1) (g/Omega**q)**L P(sigma)``, so its zeros give
    the stationary trial frequencies. For ``L = 0`` the polynomial is zero.
    """
    _check_order(series, L)
    if L == 0:
        return [Fraction(0) if series.exact else mp.mpf(0)]
    a = series.coeffs
    conv = (lambda v: v) if series.exact else to_mp
    p, q = gp.p, gp.q
    poly = [None] * (L + 1)
    for l in range(L + 1):
        m = L - l
        poly[m] = a[l] * conv((p - l * q + 2 * l - 2 * L) * generalized_binomial((p - l * q) / 2, m)) * (-1) ** m
    return poly


def poly_derivative(coeffs: Sequence) -> list:
    """Derivative of an ascending coefficient list."""
    return [k * c for k, c in enumerate(coeffs)][1:] or [0 * coeffs[0]]


def turning_polynomial(series: WeakSeries, gp: GrowthParams, L: int) -> list:
    """Strong-coupling limit of the second-derivative condition.

    With ``t = Omega**(q-2)/g`` the condition ``d2Z/dOmega2 = 0`` reads
    ``(p - 1 - q L) P + (q sigma + 2 t) P' = 0``; at large ``g`` the ``t`` term
    drops out and a polynomial in ``sigma`` remains.
    """
    P = sigma_polynomial(series, gp, L)
    dP = poly_derivative(P) + [0]
    c0 = gp.p - 1 - gp.q * L
    out = [c0 * P[k] for k in range(len(P))]
    for k in range(len(dP)):
        # q * sigma * P'(sigma) shifts powers up by one
        if k + 1 < len(out):
            out[k + 1] += gp.q * dP[k]
    return out


def second_derivative(series: WeakSeries, gp: GrowthParams, L: int, g, Omega):
    """``d2 Z_var / dOmega2`` evaluated in closed form from ``P`` and ``P'``."""
    g = to_mp(g)
    Omega = to_mp(Omega)
    p, q = to_mp(gp.p), to_mp(gp.q)
    P = [to_mp(c) for c in sigma_polynomial(series, gp, L)]
    dP = poly_derivative(P)
    sigma = sigma_of_omega(Omega, g, q)
    t = Omega ** (q - 2) / g
    pref = Omega ** (p - 2) * (g / Omega**q) ** L
    return pref * ((p - 1 - q * L) * polyval(P, sigma) + (q * sigma + 2 * t) * polyval(dP, sigma))


def _continue_branch(c, qf):
    """Follow the root of ``w**(q-2) (w**2 - 1) = s c`` from ``w = 1`` at ``s = 0``."""
    f = lambda w, s: w ** (qf - 2) * (w**2 - 1) - s * c
    df = lambda w: qf * w ** (qf - 1) - (qf - 2) * w ** (qf - 3)
    w, s, ds = mp.mpc(1), mp.mpf(0), mp.mpf(1) / 8
    tol = mp.mpf(2) ** (-mp.mp.prec // 3)
    while s < 1:
        ds = min(ds, 1 - s)
        trial = w
        ok = False
        for _ in range(12):
            step = f(trial, s + ds) / df(trial)
            trial -= step
            if abs(step) < tol * (1 + abs(trial)):
                ok = True
                break
        if ok and abs(trial - w) < abs(w) / 4:
            w, s = trial, s + ds
            ds *= 2
        else:
            ds /= 2
            if ds < mp.mpf(2) ** -40:
                raise ArithmeticError("branch continuation stalled")
    for _ in range(8):
        step = f(w, 1) / df(w)
        w -= step
        if abs(step) <= mp.eps * 4 * (1 + abs(w)):
            break
    return w


def sigma_to_omega(sigma, g, q, *, all_branches: bool = True) -> tuple[list, int]:
    """Solve ``Omega**(q-2) (Omega**2 - 1) = sigma g`` for ``Omega``.

    Returns ``(roots, index)`` where ``roots`` lists every solution for integer
    ``q`` and ``index`` points at the branch reached by continuing ``Omega = 1``
    along ``s * sigma * g`` for ``s`` from 0 to 1. For non-integer ``q``, or
    when ``all_branches`` is false, only that continued branch is returned.
    """
    if g == 0:
        raise ZeroDivisionError("g must be nonzero")
    c = to_mp(sigma) * to_mp(g)
    qf = to_mp(q)
    w = _continue_branch(c, qf)
    qq = Fraction(q)
    if qq.denominator != 1 or not all_branches or qq < 2:
        return [w], 0
    n = int(qq)
    # Omega**n - Omega**(n-2) - c, highest power first
    coeffs = [mp.mpf(1), 0, mp.mpf(-1)] + [0] * (n - 2)
    coeffs[-1] -= c
    roots = [mp.mpc(r) for r in mp.polyroots(coeffs, maxsteps=200, extraprec=2 * mp.mp.prec)]
    idx = min(range(len(roots)), key=lambda i: abs(roots[i] - w))
    roots[idx] = w
    return roots, idx


def continued_omega(sigma, g, q):
    """The ``Omega`` branch continuously connected to ``Omega = 1``."""
    return sigma_to_omega(sigma, g, q, all_branches=False)[0][0]


def _rational_power(x, e: Fraction):
    return mp.power(x, to_mp(e))


@dataclass
class StrongCouplingResult:
    """Leading strong-coupling coefficients from one optimal ``sigma``.

    ``b[k]`` multiplies ``g**(p/q - 2k/q)``.
    """

    b: list
    order_L: int
    sigma_star: object
    omega_used: object
    provenance: dict = field(default_factory=dict)


def strong_coupling_coefficients(series: WeakSeries, gp: GrowthParams, L: int,
                                 sigma_star, n_terms: int | None = None,
                                 provenance: dict | None = None) -> StrongCouplingResult:
    """Expand ``g**(-p/q) Z_var`` at fixed ``sigma`` in powers of ``g**(-2/q)``.

    Setting ``Omega = (sigma g)**(1/q) w`` turns the defining relation into
    ``w**q - lam w**(q-2) = 1`` with ``lam = (sigma g)**(-2/q)``; ``w(lam)`` is
    found by power-series reversion and substituted back.
    """
    _check_order(series, L)
    sigma_star = to_mp(sigma_star)
    if sigma_star == 0:
        raise ZeroDivisionError("reversion breaks down at sigma = 0")
    K = L if n_terms is None else n_terms
    K = min(K, L)
    p, q = gp.p, gp.q
    qf = to_mp(q)
    # w(lam) = 1 + ..., from w = (1 + lam w**(q-2))**(1/q) by fixed point
    w = TruncatedSeries.constant(1, K)
    lam = TruncatedSeries.variable(K)
    for _ in range(K + 1):
        w = (1 + lam * w.power(qf - 2)).power(1 / qf)
    eps = reexpand(series, gp, L)
    inv_wq = w.power(-qf)
    total = TruncatedSeries.constant(0, K)
    term = TruncatedSeries.constant(1, K)
    for j in range(L + 1):
        total = total + term * (polyval(eps[j], sigma_star) / sigma_star**j)
        term = term * inv_wq
    total = total * w.power(to_mp(p))
    lead = _rational_power(sigma_star, p / q)
    scale = mp.power(sigma_star, -2 / qf)
    b = [lead * total.coeffs[k] * scale**k for k in range(K + 1)]
    return StrongCouplingResult(b=b, order_L=L, sigma_star=sigma_star,
                                omega_used=gp.omega, provenance=provenance or {})


def strong_b0_closed(series: WeakSeries, gp: GrowthParams, L: int, sigma_star):
    """Leading coefficient ``b_0`` via ``sigma**(p/q) sum_l a_l sigma**-l [1-1]``."""
    sigma_star = to_mp(sigma_star)
    p, q = gp.p, gp.q
    acc = 0
    for l in range(L + 1):
        tb = truncated_binomial((p - l * q) / 2, L - l)
        acc += to_mp(series.coeffs[l]) * to_mp(tb) / sigma_star**l
    return _rational_power(sigma_star, p / q) * acc
