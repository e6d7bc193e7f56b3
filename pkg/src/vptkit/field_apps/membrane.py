"""Membrane between hard walls.

The walls are softened into ``V(h) = m**4 (d/pi)**2 tan(pi h/d)**2``. Its
Taylor coefficients play the role of anharmonic couplings ``eps_{2k}`` of an
even oscillator, and the free-energy density follows from the graded
Bender-Wu recursion. The hard-wall limit ``m -> 0`` is the strong-coupling
limit in ``x = pi**2/(m**2 d**2)``.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from ..oscillator import EvenPotential, bender_wu_coeffs
from ..series import WeakSeries, to_fraction
from ..tps import TruncatedSeries
from ._data import load_tables


def tan2_coefficients(kmax: int) -> dict:
    """Exact ``t_k`` with ``tan(y)**2 = sum_k t_k y**(2k)`` for ``1 <= k <= kmax``.

    ``tan`` comes from its Bernoulli-number series and is squared as a
    truncated power series in ``y``.
    """
    n = 2 * kmax + 1
    tan = [Fraction(0)] * (n + 1)
    for j in range(1, kmax + 2):
        p, q = mp.bernfrac(2 * j)
        B = Fraction(int(p), int(q))
        c = (-1) ** (j - 1) * 2 ** (2 * j) * (2 ** (2 * j) - 1) * B
        fact = 1
        for i in range(2, 2 * j + 1):
            fact *= i
        if 2 * j - 1 <= n:
            tan[2 * j - 1] = c / fact
    sq = TruncatedSeries(tan) * TruncatedSeries(tan)
    return {k: sq.coeffs[2 * k] for k in range(1, kmax + 1)}


def epsilon_from_tan2(kmax: int) -> dict:
    """Couplings keyed by the power ``2k`` of ``h``: ``{4: 2/3, 6: 17/45, ...}``."""
    t = tan2_coefficients(kmax)
    return {2 * k: t[k] for k in range(2, kmax + 1)}


@dataclass(frozen=True)
class ExpansionCheck:
    power: int
    printed_power: int
    computed: Fraction
    printed: Fraction
    coefficient_match: bool
    power_match: bool


def check_printed_expansion() -> list:
    """Compare the printed potential expansion with the ``tan**2`` oracle.

    The printed table carries an overall factor ``1/2``; its ``j``-th entry
    belongs to ``h**(2j+2)``.
    """
    rows = load_tables("membrane_printed")["potential_expansion"]
    eps = epsilon_from_tan2(len(rows) + 1)
    out = []
    for j, row in enumerate(rows, start=1):
        power = 2 * j + 2
        printed = 2 * to_fraction(row["coefficient"])
        out.append(ExpansionCheck(power, row["printed_power"], eps[power], printed,
                                  eps[power] == printed, power == row["printed_power"]))
    return out


class _Poly:
    """Polynomial in the couplings with Fraction coefficients (monomial -> coefficient)."""

    __slots__ = ("t",)

    def __init__(self, t=None):
        self.t = {m: c for m, c in (t or {}).items() if c != 0}

    @classmethod
    def const(cls, c):
        return cls({(): Fraction(c)})

    @classmethod
    def var(cls, power):
        return cls({((power, 1),): Fraction(1)})

    def __add__(self, o):
        t = defaultdict(Fraction, self.t)
        for m, c in o.t.items():
            t[m] += c
        return _Poly(t)

    def __neg__(self):
        return _Poly({m: -c for m, c in self.t.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, _Poly):
            return _Poly({m: c * o for m, c in self.t.items()})
        t = defaultdict(Fraction)
        for m1, c1 in self.t.items():
            for m2, c2 in o.t.items():
                d = defaultdict(int, m1)
                for v, p in m2:
                    d[v] += p
                t[tuple(sorted(d.items()))] += c1 * c2
        return _Poly(t)

    def __truediv__(self, k):
        return _Poly({m: c / k for m, c in self.t.items()})

    def evaluate(self, values: dict) -> Fraction:
        acc = Fraction(0)
        for m, c in self.t.items():
            term = c
            for v, p in m:
                term *= Fraction(values.get(v, 0)) ** p
            acc += term
        return acc

    def as_dict(self) -> dict:
        return {tuple(m): c for m, c in sorted(self.t.items())}


def symbolic_energy_coefficients(order: int) -> list:
    """Ground-state coefficients of ``x**2/2 + sum_k g**(k-1) eps_{2k} x**(2k)`` as polynomials.

    The graded Bender-Wu recursion run over polynomials in the couplings
    ``eps_4 .. eps_{2 order + 2}``; entry ``N`` is the coefficient of ``g**N``.
    """
    terms = [(k, k - 1, _Poly.var(2 * k)) for k in range(2, order + 2)]
    c = [[_Poly.const(1)]]
    E = [_Poly.const(Fraction(1, 2))]
    for n in range(1, order + 1):
        imax = 2 * n
        cn = [_Poly()] * (imax + 2)
        for i in range(imax, 0, -1):
            s = cn[i + 1] * ((i + 1) * (2 * i + 1))
            for k, shift, e in terms:
                prev = n - shift
                if prev >= 0 and 0 <= i - k < len(c[prev]):
                    s = s - e * c[prev][i - k]
            for m in range(1, n):
                if i < len(c[n - m]):
                    s = s + E[m] * c[n - m][i]
            cn[i] = s / (2 * i)
        E.append(-cn[1])
        c.append(cn[: imax + 1])
    return E


def printed_combination(order: int) -> dict:
    """The printed free-energy combination, as ``{monomial: coefficient}`` per order."""
    table = load_tables("membrane_printed")["free_energy_combination"]
    out = {}
    for N in range(1, order + 1):
        entry = table[str(N)]
        pre = to_fraction(entry["prefactor"])
        out[N] = {tuple(sorted((int(v), p) for v, p in mono.items())): pre * to_fraction(c)
                  for mono, c in entry["terms"]}
    return out


@dataclass(frozen=True)
class CombinationCheck:
    order: int
    monomial: tuple
    computed: Fraction
    printed: Fraction

    @property
    def match(self) -> bool:
        return self.computed == self.printed


def check_printed_combination(order: int = 4) -> list:
    """Monomial-by-monomial comparison of the printed combination with the recursion."""
    sym = symbolic_energy_coefficients(order)
    printed = printed_combination(order)
    rows = []
    for N in range(1, order + 1):
        comp = sym[N].as_dict()
        for mono in sorted(set(comp) | set(printed[N])):
            rows.append(CombinationCheck(N, mono, comp.get(mono, Fraction(0)),
                                         printed[N].get(mono, Fraction(0))))
    return rows


def membrane_series(order: int = 4, *, source: str = "tan2") -> WeakSeries:
    """Coefficients ``a_N`` of ``f = (m**2/2) sum_N a_N x**N`` with ``x = pi**2/(m**2 d**2)``.

    ``source="tan2"`` takes the couplings from the Taylor expansion of
    ``tan**2``; ``source="printed"`` from the printed potential expansion
    (coefficient values only, which agree with ``tan**2``).
    """
    if not 0 <= order <= 12:
        raise ValueError("order must lie in 0..12")
    if source == "tan2":
        eps = epsilon_from_tan2(order + 1)
    elif source == "printed":
        rows = load_tables("membrane_printed")["potential_expansion"]
        if order > len(rows):
            raise ValueError(f"printed expansion covers order <= {len(rows)}")
        eps = {2 * j + 2: 2 * to_fraction(r["coefficient"]) for j, r in enumerate(rows, 1)}
    else:
        raise ValueError(f"unknown source {source!r}")
    pot = EvenPotential(tuple((p // 2, e) for p, e in eps.items() if p // 2 <= order + 1))
    E = bender_wu_coeffs(pot, order).coeffs
    return WeakSeries(tuple(2 * a for a in E), "pi^2/(m^2 d^2)",
                      "f = (m^2/2) sum_N a_N x^N, couplings from " + source)


__all__ = ["CombinationCheck", "ExpansionCheck", "check_printed_combination",
           "check_printed_expansion", "epsilon_from_tan2", "membrane_series",
           "printed_combination", "symbolic_energy_coefficients", "tan2_coefficients"]
