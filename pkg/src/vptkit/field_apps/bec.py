"""Shift of the Bose-Einstein condensation temperature.

The strong-coupling (critical) limit of the five-loop expansion of
``<phi**2/u>`` in ``u/(4 pi m)`` gives ``c_1`` through
``c_1 = -1103.09 <phi**2/u>``. Because the field has an anomalous dimension
the approach exponent ``omega'`` is determined from the series itself, via
the vanishing extremum of the variational logarithmic derivative.

Variants
--------
``qm-naive``
    ``q = 1`` throughout, as for a quantum-mechanical series.
``full``
    All coefficients; ``q = 1`` for ``W_2``, ``q = 2/omega'_L`` for ``L = 3, 4``.
``fixed-q``
    All coefficients at ``q = 2/0.81``.
``drop-leading``
    Leading ``1/u`` term removed; ``q = 2/0.81`` or the self-consistent value.
``large-N``
    Leading large-``N`` coefficients at ``q = 2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
from scipy.optimize import minimize_scalar

from ._data import load_tables
from ._wk import NoStationaryPointError, optimize, vanishing_extrema, wk_coeffs

VARIANTS = ("qm-naive", "full", "fixed-q", "drop-leading", "large-N")
N_PHYSICAL = 2


def _mp_table(d: dict) -> dict:
    return {int(k): mp.mpf(v) for k, v in d.items()}


@dataclass(frozen=True)
class BecCoefficients:
    """Printed coefficient sets, loaded verbatim from the shipped table."""

    full: dict
    beta: dict
    large_n: dict
    conversion: object
    omega_prime_inf: object
    exact_large_n: object

    @property
    def drop_leading(self) -> dict:
        return {l: f for l, f in self.full.items() if l >= 1}

    @classmethod
    def load(cls) -> "BecCoefficients":
        t = load_tables("bec_coefficients")
        full = {l: f for l, f in _mp_table(t["n2_full"]).items() if f != 0}
        return cls(full, _mp_table(t["n2_beta"]), _mp_table(t["large_n"]),
                   mp.mpf(t["conversion_c1"]), mp.mpf(t["omega_prime_infinity"]),
                   mp.mpf(t["large_n_exact_c1"]))


def two_loop_coefficients(N=N_PHYSICAL) -> dict:
    """``f_{-1}`` and ``f_1`` from their closed forms.

    ``f_{-1} = -N/(16 pi**2)`` and ``f_1 = -a_2 N (N+2)/(288 pi**2)`` with
    ``a_2 = log(4/3)/2``.
    """
    N = mp.mpf(N)
    a2 = mp.log(mp.mpf(4) / 3) / 2
    return {-1: -N / (16 * mp.pi**2), 1: -a2 * N * (N + 2) / (288 * mp.pi**2)}


def beta_from_f(f: dict) -> dict:
    """Coefficients of ``d log F / d log u`` for ``F = sum f_l x**l`` with leading ``l = -1``."""
    fm = f[-1]
    out = {0: mp.mpf(-1), 2: 2 * f[1] / fm}
    if 2 in f:
        out[3] = 3 * f[2] / fm
    if 3 in f:
        out[4] = 4 * f[3] / fm - 2 * f[1] ** 2 / fm**2
    return out


def beta_drop_leading(f: dict) -> dict:
    """Same for the series that starts at ``l = 1``."""
    return {0: mp.mpf(1), 1: f[2] / f[1], 2: 2 * f[3] / f[1] - f[2] ** 2 / f[1] ** 2}


@dataclass(frozen=True)
class OmegaPrime:
    value: object                # complex when no real vanishing extremum exists
    q: object
    K: object
    source: str


def omega_prime(beta: dict, top: int, reference=1) -> OmegaPrime:
    """``omega' = 2/q`` from the vanishing extremum of the variational ``beta``.

    Among solutions with ``Re omega' > 0`` the one closest to ``reference``
    is taken: the previous order's value when tracking a sequence, the
    mean-field value 1 at the lowest order. Complex pairs are reported with
    ``Im omega' >= 0``.
    """
    cands = [v for v in vanishing_extrema(beta, top) if mp.re(2 / v.q) > 0]
    if not cands:
        raise NoStationaryPointError(f"no vanishing extremum at top order {top}")
    ref = mp.mpmathify(reference)
    v = min(cands, key=lambda v: (abs(2 / v.q - ref), -mp.im(2 / v.q)))
    w = 2 / v.q
    if mp.im(w) < 0:
        w = mp.conj(w)
    src = "vanishing-extremum" if mp.im(w) == 0 else "complex-vanishing-extremum"
    return OmegaPrime(w, v.q, v.K, src)


def omega_prime_sequence(beta: dict, tops=(3, 4)) -> list:
    """``omega'`` order by order, each continued from the one before."""
    out, ref = [], 1
    for top in tops:
        om = omega_prime(beta, top, reference=ref)
        out.append(om)
        ref = om.value
    return out


def omega_prime_drop_leading_closed(f: dict):
    """Closed form ``1/(2 sqrt(2 f1 f3/f2**2 - 1) - 1)``."""
    return 1 / (2 * mp.sqrt(2 * f[1] * f[3] / f[2] ** 2 - 1) - 1)


def omega_prime_large_n(N):
    """Large-``N`` expansion of ``omega'`` through second order in ``1/N``."""
    x = 8 / (3 * mp.pi**2 * mp.mpf(N))
    return 1 - 8 * x + 2 * (mp.mpf(104) / 3 - 9 * mp.pi**2 / 2) * x**2


@dataclass
class C1Result:
    variant: str
    L: int
    q: object
    omega_prime: object
    W_opt: object
    K_opt: object
    kind: str
    c1: object
    diagnostics: dict = field(default_factory=dict)


def _finish(variant, L, coeffs, top, q, conv, scale, diag, omega=None, prefer="extremum"):
    wc = wk_coeffs(coeffs, top, q)
    opt = optimize(wc, prefer=prefer)
    return C1Result(variant, L, q, 2 / q if omega is None else omega, opt.W, opt.K, opt.kind,
                    conv * scale * opt.W, diag)


def bec_c1(variant: str, L: int, *, coefficients: BecCoefficients | None = None,
           sub_variant: str = "exact-q") -> C1Result:
    """``c_1`` from the ``L``-th variational approximant of one variant.

    ``W_L`` of the ``full`` and ``fixed-q`` families uses ``f_{-1} .. f_{L-1}``;
    ``W^QM_L``, ``drop-leading`` and ``large-N`` use terms through ``f_L``.
    ``sub_variant`` selects ``q`` for ``drop-leading``: ``"exact-q"`` uses
    ``2/0.81``, ``"self-consistent"`` uses ``omega'_3`` of the reduced
    logarithmic derivative.
    """
    c = coefficients or BecCoefficients.load()
    conv = c.conversion
    if variant == "qm-naive":
        if L not in (1, 2, 3):
            raise ValueError("qm-naive is defined for L = 1, 2, 3")
        return _finish(variant, L, c.full, L, 1, conv, 1, {})
    if variant == "full":
        if L not in (2, 3, 4):
            raise ValueError("full is defined for L = 2, 3, 4")
        if L == 2:
            return _finish(variant, L, c.full, 1, 1, conv, 1, {"q_rule": "naive q = 1"})
        om = omega_prime_sequence(c.beta, range(3, L + 1))[-1]
        diag = {"omega_prime_raw": om.value, "omega_prime_source": om.source}
        q = 2 / mp.re(om.value)
        return _finish(variant, L, c.full, L - 1, q, conv, 1, diag, omega=om.value)
    if variant == "fixed-q":
        if L not in (2, 3, 4):
            raise ValueError("fixed-q is defined for L = 2, 3, 4")
        q = 2 / c.omega_prime_inf
        return _finish(variant, L, c.full, L - 1, q, conv, 1, {})
    if variant == "drop-leading":
        if L not in (2, 3):
            raise ValueError("drop-leading is defined for L = 2, 3")
        f = c.drop_leading
        diag = {}
        if sub_variant == "exact-q":
            q = 2 / c.omega_prime_inf
        elif sub_variant == "self-consistent":
            om = omega_prime(beta_drop_leading(f), 2)
            diag = {"omega_prime_closed": omega_prime_drop_leading_closed(f),
                    "omega_prime_source": om.source}
            q = 2 / om.value
        else:
            raise ValueError(f"unknown sub-variant {sub_variant!r}")
        # W_3 has no extremum here; its optimum is the turning point
        prefer = "extremum" if L == 2 else "turning-point"
        return _finish(variant, L, f, L, q, conv, 1, diag, prefer=prefer)
    if variant == "large-N":
        if L not in (2, 3):
            raise ValueError("large-N is defined for L = 2, 3")
        res = _finish(variant, L, c.large_n, L, 2, conv, N_PHYSICAL,
                      {"exact_large_n": c.exact_large_n}, prefer="extremum" if L == 2 else "turning-point")
        res.diagnostics["relative_error_vs_exact"] = (res.c1 - c.exact_large_n) / c.exact_large_n
        return res
    raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")


@dataclass(frozen=True)
class Extrapolation:
    a: float
    b: float
    s: float
    residual: float


def bec_extrapolate(Lbar, c1, s: float | None = 6.0) -> Extrapolation:
    """Least-squares fit ``c1 = a + b / Lbar**s``.

    With ``s=None`` the exponent is also fitted (needs at least three points).
    """
    x = np.asarray(Lbar, dtype=float)
    y = np.asarray([float(v) for v in c1])
    if len(x) < 2 or len(x) != len(y):
        raise ValueError("need at least two (Lbar, c1) pairs of equal length")
    if np.ptp(x) == 0:
        raise ValueError("degenerate fit: all Lbar equal")

    def linfit(s):
        A = np.column_stack([np.ones_like(x), x ** -s])
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        return coef, float(np.sum((A @ coef - y) ** 2))

    if s is not None:
        (a, b), r = linfit(s)
        return Extrapolation(float(a), float(b), float(s), r)
    if len(x) < 3:
        raise ValueError("a free exponent needs at least three points")
    best = minimize_scalar(lambda s: linfit(s)[1], bounds=(0.5, 20), method="bounded")
    (a, b), r = linfit(best.x)
    return Extrapolation(float(a), float(b), float(best.x), r)


__all__ = ["BecCoefficients", "C1Result", "Extrapolation", "OmegaPrime", "VARIANTS",
           "bec_c1", "bec_extrapolate", "beta_drop_leading", "beta_from_f",
           "omega_prime", "omega_prime_sequence", "omega_prime_drop_leading_closed", "omega_prime_large_n",
           "two_loop_coefficients"]
