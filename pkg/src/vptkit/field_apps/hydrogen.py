"""Hydrogen atom in a strong magnetic field, first-order variational treatment.

Units: ``hbar = M = e = 1``, energies in ``2 Ryd``, field ``B`` in atomic
units. The binding energy is ``eps(B) = B/2 - E(B)`` with the trial
frequencies ``Omega = Omega_perp`` and ``eta = 2 Omega_par / Omega_perp``.

Weak field
    Writing ``Omega = 2 v**2/pi``, ``eta = 1 + delta`` and ``u = pi**2 B**2``
    turns ``pi (eps - B/2)`` into a function with rational Taylor
    coefficients, so the expansion in ``B**2`` is solved order by order in
    exact arithmetic and the powers of ``pi`` are restored afterwards.
Any field
    Newton iteration on the two stationarity conditions, continued in ``B``
    from the zero-field solution ``(eta, Omega) = (1, 32/(9 pi))``.
Strong field
    Logarithmic asymptotics with ``a = 2 - ln 2`` and ``b = ln(pi/2) - 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from ..series import to_fraction
from ..tps import TruncatedSeries
from ._data import load_tables

OMEGA0_COEFF = Fraction(32, 9)          # Omega_0 = (32/9)/pi


class NewtonDivergenceError(ArithmeticError):
    """The stationarity iteration did not converge."""


class DomainError(ValueError):
    """A parameter left its physical range."""


# ---------------------------------------------------------------------------
# weak field, exact


def _exact_series(coeffs, order):
    c = [Fraction(x) for x in coeffs[: order + 1]]
    return TruncatedSeries(tuple(c + [Fraction(0)] * (order + 1 - len(c))))


def _G_coeffs(order: int) -> list:
    """``sqrt(1+d) h(1+d)`` in powers of ``d``, with ``h(1+d) = -2 sum (-d)**k/(2k+1)``."""
    H = _exact_series([Fraction(-2 * (-1) ** k, 2 * k + 1) for k in range(order + 1)], order)
    root = _exact_series([1, 1], order).power(Fraction(1, 2))
    return list((root * H).coeffs)


def _deriv(c: list) -> list:
    return [k * c[k] for k in range(1, len(c))]


def _compose(poly: list, s: TruncatedSeries) -> TruncatedSeries:
    """``sum_k poly[k] s**k`` for a series ``s`` without constant term."""
    acc = _exact_series([poly[-1]], s.order)
    for c in reversed(poly[:-1]):
        acc = acc * s + c
    return acc


def _weak_residuals(v: list, d: list, order: int):
    G = _G_coeffs(order + 1)
    G1 = _deriv(G)[: order + 1]
    G = G[: order + 1]
    vs, ds = _exact_series(v, order), _exact_series(d, order)
    u = _exact_series([0, 1], order)
    g, g1 = _compose(G, ds), _compose(G1, ds)
    vinv2 = vs.power(-2)
    vinv3 = vs.power(-3)
    half_eta = (ds + 3) * Fraction(1, 2)           # 1 + eta/2 with eta = 1 + d
    F = -(vs * vs) * half_eta * Fraction(1, 2) - u * vinv2 * Fraction(1, 8) - vs * g
    Fv = -vs * half_eta + u * vinv3 * Fraction(1, 4) - g
    Fe = -(vs * vs) * Fraction(1, 4) - vs * g1
    return F, Fv, Fe


@dataclass(frozen=True)
class WeakCoefficients:
    """``eta_n``, ``Omega_n`` and ``eps_n`` as ``(rational, power of pi)`` pairs."""

    eta: tuple
    Omega: tuple
    epsilon: tuple

    def numeric(self, name: str) -> list:
        return [r * mp.pi**k for r, k in ((mp.mpf(x.numerator) / x.denominator, k) for x, k in getattr(self, name))]


def hydrogen_weak_coefficients(order: int = 3) -> WeakCoefficients:
    """Weak-field coefficients through ``B**(2 order)``, exact.

    ``eps(B) = B/2 - sum_n eps_n B**(2n)``; ``eta_n`` carries ``pi**(2n)``,
    ``Omega_n`` and ``eps_n`` carry ``pi**(2n-1)``.
    """
    G = _G_coeffs(2)
    v0 = Fraction(-2, 3) * G[0]
    assert 2 * v0 * v0 == OMEGA0_COEFF
    # zeroth-order Jacobian of (F_v, F_eta) with respect to (v, delta)
    Jvv = Fraction(-3, 2)
    Jvd = -v0 / 2 - G[1]
    Jdd = -v0 * 2 * G[2]
    det = Jvv * Jdd - Jvd * Jvd
    if det == 0:
        raise ArithmeticError("singular zeroth-order Jacobian")
    v, d = [v0] + [Fraction(0)] * order, [Fraction(0)] * (order + 1)
    for n in range(1, order + 1):
        _, Fv, Fe = _weak_residuals(v, d, order)
        rv, re = Fv.coeffs[n], Fe.coeffs[n]
        v[n] = -(Jdd * rv - Jvd * re) / det
        d[n] = -(-Jvd * rv + Jvv * re) / det
    F, Fv, Fe = _weak_residuals(v, d, order)
    assert all(c == 0 for c in Fv.coeffs) and all(c == 0 for c in Fe.coeffs)
    v2 = (_exact_series(v, order) * _exact_series(v, order)).coeffs
    eta = tuple((Fraction(1) if n == 0 else d[n], 2 * n) for n in range(order + 1))
    Omega = tuple((2 * v2[n], 2 * n - 1) for n in range(order + 1))
    eps = tuple((-F.coeffs[n], 2 * n - 1) for n in range(order + 1))
    return WeakCoefficients(eta, Omega, eps)


def printed_weak_coefficients() -> WeakCoefficients:
    t = load_tables("hydrogen_printed")["weak_coefficients"]

    def conv(rows):
        return tuple((to_fraction(r), int(k)) for r, k in rows)
    return WeakCoefficients(conv(t["eta"]), conv(t["Omega"]), conv(t["epsilon"]))


# ---------------------------------------------------------------------------
# numerical solution


def h_function(eta):
    """``ln((1-s)/(1+s))/s`` with ``s = sqrt(1-eta)``, continued through ``eta = 1``."""
    eta = mp.mpf(eta)
    x = 1 - eta
    if x > 0:
        s = mp.sqrt(x)
        return -2 * mp.atanh(s) / s
    if x < 0:
        s = mp.sqrt(-x)
        return -2 * mp.atan(s) / s
    return mp.mpf(-2)


def binding_energy(eta, Omega, B):
    """First-order variational binding energy ``eps(eta, Omega; B)``."""
    eta, Omega, B = mp.mpf(eta), mp.mpf(Omega), mp.mpf(B)
    return (B / 2 - Omega / 4 * (1 + eta / 2) - B**2 / (4 * Omega)
            - mp.sqrt(eta * Omega / (2 * mp.pi)) * h_function(eta))


def stationarity_residuals(eta, Omega, B) -> tuple:
    """The two extremum conditions (both vanish at the optimum)."""
    eta, Omega, B = mp.mpf(eta), mp.mpf(Omega), mp.mpf(B)
    h = h_function(eta)
    if eta == 1:
        # h = -2 - 2 (1 - eta)/3 + ..., so (1 + h/2)/(1 - eta) -> -1/3
        core = -mp.mpf(1) / 3
    else:
        core = (1 + h / 2) / (1 - eta)
    r1 = Omega / 8 + mp.sqrt(Omega / (2 * mp.pi * eta)) * core
    r2 = mp.mpf(1) / 4 + eta / 8 - B**2 / (4 * Omega**2) + mp.sqrt(eta / (2 * mp.pi * Omega)) * h / 2
    return r1, r2


@dataclass(frozen=True)
class HydrogenState:
    B: object
    eta: object
    Omega: object
    binding: object
    residual: object = None


def _newton(B, eta0, Om0, tol):
    # log variables keep both parameters positive during the iteration
    def f(le, lo):
        return stationarity_residuals(mp.exp(le), mp.exp(lo), B)
    try:
        le, lo = mp.findroot(f, (mp.log(eta0), mp.log(Om0)), tol=tol**2, maxsteps=60)
    except (ValueError, ZeroDivisionError) as exc:
        r = f(mp.log(eta0), mp.log(Om0))
        raise NewtonDivergenceError(f"Newton failed at B={mp.nstr(B, 6)}; start residuals "
                                    f"{mp.nstr(r[0], 3)}, {mp.nstr(r[1], 3)}") from exc
    eta, Om = mp.exp(le), mp.exp(lo)
    res = max(abs(x) for x in stationarity_residuals(eta, Om, B))
    if res > tol:
        raise NewtonDivergenceError(f"residual {mp.nstr(res, 3)} above {tol} at B={mp.nstr(B, 6)}")
    if not 0 < eta <= 1:
        raise DomainError(f"eta = {mp.nstr(eta, 8)} left (0, 1] at B={mp.nstr(B, 6)}")
    return eta, Om, res


def hydrogen_solve(B_values, *, tol: float = 1e-20, start_B: float = 1e-3,
                   ratio: float = 1.25) -> list:
    """Optimal ``(eta, Omega)`` and binding energy for each field in ``B_values``.

    Fields are visited in increasing order along a geometric path starting
    at ``start_B``, where the weak-field series supplies the initial point.
    """
    B_sorted = sorted(mp.mpf(b) for b in B_values)
    if not B_sorted or B_sorted[0] <= 0:
        raise DomainError("fields must be positive")
    weak = hydrogen_weak_coefficients(3)
    b = min(mp.mpf(start_B), B_sorted[0])
    eta = sum(c * b ** (2 * n) for n, c in enumerate(weak.numeric("eta")))
    Om = sum(c * b ** (2 * n) for n, c in enumerate(weak.numeric("Omega")))
    eta, Om, _ = _newton(b, eta, Om, tol)
    out = {}
    for target in B_sorted:
        while b < target:
            nb = min(b * ratio, target)
            # extrapolate in log B for a better start
            eta, Om, _ = _newton(nb, eta, Om * nb / b if nb > 10 else Om, tol)
            b = nb
        eta, Om, res = _newton(target, eta, Om, tol)
        out[target] = HydrogenState(target, eta, Om, binding_energy(eta, Om, target), res)
    return [out[mp.mpf(x)] for x in B_values]


def hydrogen_binding(B, mode: str = "solve", *, order: int = 3) -> HydrogenState:
    """Binding energy at field ``B`` by ``solve``, ``weak-series`` or ``strong-asymptotic``."""
    B = mp.mpf(B)
    if B <= 0:
        raise DomainError("B must be positive")
    if mode == "solve":
        return hydrogen_solve([B])[0]
    if mode == "weak-series":
        w = hydrogen_weak_coefficients(order)
        eta = sum(c * B ** (2 * n) for n, c in enumerate(w.numeric("eta")))
        Om = sum(c * B ** (2 * n) for n, c in enumerate(w.numeric("Omega")))
        eps = B / 2 - sum(c * B ** (2 * n) for n, c in enumerate(w.numeric("epsilon")))
        return HydrogenState(B, eta, Om, eps)
    if mode == "strong-asymptotic":
        return HydrogenState(B, None, None, strong_asymptotic(B).total)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# strong field

A_CONST = 2 - mp.log(2)
B_CONST = mp.log(mp.pi / 2) - 2


@dataclass(frozen=True)
class StrongAsymptotic:
    B: object
    leading: tuple          # six terms of order ln**2 .. ln**0
    subleading: tuple       # three terms suppressed by 1/ln B
    total: object
    landau: object


def strong_asymptotic(B) -> StrongAsymptotic:
    """Terms of the large-``B`` expansion of the binding energy."""
    B = mp.mpf(B)
    if B <= mp.e:
        raise DomainError("the asymptotic form needs ln ln B to exist")
    a, b = mp.log(B), B_CONST
    ll = mp.log(a)
    pi = mp.pi
    leading = (a**2 / pi, -4 * a * ll / pi, 4 * ll**2 / pi, -4 * b * ll / pi,
               2 * (b + 2) * a / pi, b**2 / pi)
    sub = (-8 * ll**2 / (pi * a), 8 * b * ll / (pi * a), -2 * b**2 / (pi * a))
    return StrongAsymptotic(B, leading, sub, mp.fsum(leading) + mp.fsum(sub), a**2 / 2)


def hydrogen_strong_iteration(B, iterations: int = 3) -> dict:
    """Iterates of ``sqrt(Omega_par)`` and the expanded closed form.

    Starts at ``(2/sqrt(pi)) ln(2 B e**-2)`` and reinserts into
    ``sqrt(Omega_par) = (2/sqrt(pi)) (ln B - ln Omega_par + ln 2 - 2)``.
    """
    if not 1 <= iterations <= 3:
        raise ValueError("iterations must be 1, 2 or 3")
    B = mp.mpf(B)
    L = mp.log(2 * B) - 2
    if L <= 0:
        raise DomainError("ln(2 B e**-2) must be positive")
    c = 2 / mp.sqrt(mp.pi)
    it = [c * L]
    for _ in range(iterations - 1):
        if it[-1] <= 0:
            raise DomainError("iterate left the logarithm's domain")
        it.append(c * (L - 2 * mp.log(it[-1])))
    lnB = mp.log(B)
    a, b = A_CONST, B_CONST
    expanded = c * (lnB - 2 * mp.log(lnB) + 2 * a / lnB + a**2 / lnB**2 + b)
    closed3 = c * (L - 2 * mp.log(c * (L - 2 * mp.log(c * L))))
    return {"iterates": it, "closed_third": closed3, "expanded": expanded, "a": a, "b": b}


__all__ = ["A_CONST", "B_CONST", "DomainError", "HydrogenState", "NewtonDivergenceError",
           "StrongAsymptotic", "WeakCoefficients", "binding_energy", "h_function",
           "hydrogen_binding", "hydrogen_solve", "hydrogen_strong_iteration",
           "hydrogen_weak_coefficients", "printed_weak_coefficients",
           "stationarity_residuals", "strong_asymptotic"]
