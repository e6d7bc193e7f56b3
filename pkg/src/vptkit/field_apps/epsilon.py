"""Critical exponents of the O(n) phi**4 theory in ``D = 4 - eps``.

Two routes are provided. ``exponent_closed_forms`` evaluates the closed
expressions for the Wegner exponent and ``nu``. ``wegner_limits`` derives
them from the bare-coupling series by taking variational strong-coupling
limits, where the approach exponent is fixed by demanding a vanishing
extremum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ..series import to_fraction, to_mp
from ..tps import TruncatedSeries
from ._wk import stationary_points, vanishing_extrema, wk_coeffs, wk_value


class OrderError(ValueError):
    """Requested order exceeds the known terms."""


def _num(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        return to_fraction(x)
    return to_mp(x)


def _pair(n, eps):
    """Both exact, or both mpmath numbers."""
    n, e = _num(n), _num(eps)
    if isinstance(n, Fraction) and isinstance(e, Fraction):
        return n, e
    return to_mp(n), to_mp(e)


@dataclass(frozen=True)
class EpsilonSeriesSet:
    """Bare-coupling series at fixed ``n`` and ``eps``, ascending in ``g0``.

    ``coupling`` is ``g(g0)``, ``mass`` is ``m**2(g0)/m0**2`` and ``eta`` is
    ``eta(g0)``. Exact when ``n`` and ``eps`` are rational.
    """

    n: object
    eps: object
    coupling: tuple = field(init=False)
    mass: tuple = field(init=False)
    eta: tuple = field(init=False)

    def __post_init__(self):
        n, e = _pair(self.n, self.eps)
        if e == 0:
            raise ZeroDivisionError("the bare-coupling series are singular at eps = 0")
        g = (0, 1, -(n + 8) / (3 * e), (n + 8) ** 2 / (9 * e * e) + (9 * n + 42) / (18 * e))
        m = (1, -(n + 2) / (3 * e), (n + 2) * (n + 5) / (9 * e * e) + 5 * (n + 2) / (36 * e))
        # second term taken at g0**3: both printed terms carry g0**2, which
        # would merge them into a single coefficient
        eta = (0, 0, (n + 2) / 18, -(n + 2) * (n + 8) / 216 * (1 - 8 / e))
        object.__setattr__(self, "coupling", g)
        object.__setattr__(self, "mass", m)
        object.__setattr__(self, "eta", eta)


def log_derivative(coeffs, order: int) -> list:
    """Coefficients of ``x f'(x) / f(x)`` through ``x**order``.

    Leading zeros of ``f`` are allowed: ``f = x**s h`` gives ``s + x h'/h``.
    """
    c = list(coeffs[: order + 2])
    shift = 0
    while c and c[0] == 0:
        c.pop(0)
        shift += 1
    c = (c + [0] * (order + 1))[: order + 1]
    h = TruncatedSeries(c)
    ratio = TruncatedSeries([k * ck for k, ck in enumerate(c)]) * h.power(-1)
    out = [ratio.coeffs[k] for k in range(order + 1)]
    out[0] += shift
    return out


def exponent_closed_forms(n, eps) -> dict:
    """Closed-form ``omega`` and ``nu`` (``alpha = 2 - 3 nu`` added for ``D = 3``)."""
    n, e = to_mp(n), to_mp(eps)
    omega = e / (2 * mp.sqrt(1 + 3 * (3 * n + 14) * e / (n + 8) ** 2) - 1)
    nu = (1 + 5 * e / (2 * (n + 8))) / (
        2 * (1 - (n - 3) * e / (2 * (n + 8)) - 3 * (n + 2) * (3 * n + 14) * e**2 / (2 * (n + 8) ** 3)))
    return {"omega": omega, "nu": nu, "alpha": 2 - 3 * nu}


def epsilon_expansion_exponents(n, eps, order: int = 2) -> dict:
    """Partial sums of the ``eps`` expansions of ``eta``, ``nu`` and ``omega``."""
    if not 0 <= order <= 2:
        raise OrderError(f"only terms through eps**2 are known, requested order {order}")
    n, e = _pair(n, eps)
    eta_t = (0, 0, (n + 2) / (2 * (n + 8) ** 2))
    nu_t = (Fraction(1, 2), (n + 2) / (4 * (n + 8)), (n + 2) * (n + 3) * (n + 20) / (8 * (n + 8) ** 3))
    om_t = (0, 1, -3 * (3 * n + 14) / (n + 8) ** 2)

    def partial(t):
        return sum(t[k] * e**k for k in range(order + 1))
    return {"eta": partial(eta_t), "nu": partial(nu_t), "omega": partial(om_t)}


def large_n_pattern(order: int = 2) -> dict:
    """Coefficients of the ``eps`` expansion of ``nu`` as ``n -> infinity``."""
    if not 0 <= order <= 2:
        raise OrderError(f"only terms through eps**2 are known, requested order {order}")
    # (n+2)/(4(n+8)) -> 1/4, (n+2)(n+3)(n+20)/(8(n+8)**3) -> 1/8
    return {"nu": [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)][: order + 1]}


@dataclass(frozen=True)
class WegnerResult:
    omega_over_eps: object
    q: object
    K_omega: object
    gamma_m_star: object
    K_mass: object
    nu: object
    nu_printed_relation: object


def wegner_limits(series: EpsilonSeriesSet, order: int = 2) -> WegnerResult:
    """Strong-coupling limits of the logarithmic derivatives.

    ``omega/eps`` is ``-1 - g0 g''/g'`` at infinite ``g0``. Equivalently the
    logarithmic derivative ``d ln g / d ln g0`` must vanish there like
    ``g0**(-omega/eps)``; asking the variational function for a vanishing
    extremum fixes ``q`` and ``omega/eps = 2/q``. The mass exponent then
    follows from the ordinary extremum at that ``q``, and
    ``nu = 1/(2 (1 - gamma_m*))``.
    """
    if order < 2:
        raise OrderError("a vanishing extremum needs at least two terms beyond the constant")
    if order > 2:
        raise OrderError(f"only terms through g0**2 are known, requested order {order}")
    e = to_mp(series.eps)
    s = log_derivative(series.coupling, order)
    coeffs = {l: to_mp(c) for l, c in enumerate(s)}
    # real positive q; among several, the one continuing q = 2 at eps -> 0
    cands = [v for v in vanishing_extrema(coeffs, order)
             if mp.im(v.q) == 0 and v.q > 0 and mp.im(v.K) == 0 and v.K > 0]
    if not cands:
        raise ArithmeticError("no real vanishing extremum of the coupling log-derivative")
    best = min(cands, key=lambda v: abs(v.q - 2))
    K, q = best.K, best.q
    m = log_derivative(series.mass, order)
    mc = wk_coeffs({l: to_mp(c) for l, c in enumerate(m)}, order, q)
    ks = stationary_points(mc, 1)
    if not ks:
        raise ArithmeticError("mass series has no extremum at the tuned q")
    Km = ks[0]
    lim = wk_value(mc, Km)
    gamma = -e / 2 * lim
    return WegnerResult(2 / q, q, K, gamma, Km, 1 / (2 * (1 - gamma)), 1 / (2 - gamma))


__all__ = ["EpsilonSeriesSet", "OrderError", "WegnerResult", "exponent_closed_forms",
           "epsilon_expansion_exponents", "large_n_pattern", "log_derivative", "wegner_limits"]
