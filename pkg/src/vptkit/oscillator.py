"""Anharmonic-oscillator suite.

Ground-state perturbation coefficients for even polynomial potentials, the
variational strong-coupling and tunneling analysis of
``V = x**2/2 + g x**4`` and the large-order machinery that turns the ratio
``a_l / a_{l-1}`` into the fluctuation expansion around the critical bubble.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath as mp
import numpy as np

try:  # gmpy2 rationals are several times faster than Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - optional speedup
    _Q = Fraction

from . import roots as R
from .series import (GrowthParams, WeakSeries, continued_omega, second_derivative,
                     sigma_polynomial, strong_coupling_coefficients, to_mp,
                     turning_polynomial, variational_value)

OSC_GP = GrowthParams(1, 3)
EXACT_B0 = mp.mpf("0.667986259155777108270962")


@dataclass(frozen=True)
class EvenPotential:
    """``V = x**2/2 + sum_k g**(k-1) eps_k x**(2k)`` for ``k >= 2``.

    With ``graded=False`` every interaction term carries a single power of
    ``g``. The two conventions coincide for a pure quartic.
    """

    couplings: tuple  # ((k, eps_k), ...)
    graded: bool = True

    def __post_init__(self):
        items = tuple(sorted((int(k), Fraction(e)) for k, e in dict(self.couplings).items() if e != 0))
        if any(k < 2 for k, _ in items):
            raise ValueError("interaction powers start at x**4 (k >= 2)")
        object.__setattr__(self, "couplings", items)

    @classmethod
    def quartic(cls) -> "EvenPotential":
        return cls(((2, 1),))


def bender_wu_coeffs(potential: EvenPotential, L: int) -> WeakSeries:
    """Exact ground-state energy coefficients ``E = sum_l a_l g**l``.

    Writes ``psi = exp(-x**2/2) sum_n g**n phi_n`` with even polynomials
    ``phi_n = sum_i c[n][i] x**(2i)``, ``phi_0 = 1`` and ``phi_n(0) = 0``. Matching
    powers of ``x`` gives the coefficients from the highest power down and
    ``E_n = -c[n][1]``.
    """
    return WeakSeries(_bender_wu(potential.couplings, potential.graded, L), "g",
                      "V = x^2/2 + sum_k g^(k-1) eps_k x^(2k)" if potential.graded
                      else "V = x^2/2 + g sum_k eps_k x^(2k)")


@lru_cache(maxsize=16)
def _bender_wu(couplings: tuple, graded: bool, L: int) -> tuple:
    terms = [(k, (k - 1) if graded else 1, _Q(e.numerator, e.denominator)) for k, e in couplings]
    grow = max(k / s for k, s, _ in terms) if terms else 0
    c = [[_Q(1)]]
    E = [_Q(1, 2)]
    for n in range(1, L + 1):
        imax = int(grow * n)
        cn = [_Q(0)] * (imax + 2)
        for i in range(imax, 0, -1):
            s = (i + 1) * (2 * i + 1) * cn[i + 1]
            for k, shift, e in terms:
                prev = n - shift
                if prev >= 0 and 0 <= i - k < len(c[prev]):
                    s -= e * c[prev][i - k]
            for m in range(1, n):
                cm = c[n - m]
                if i < len(cm):
                    s += E[m] * cm[i]
            cn[i] = s / (2 * i)
        E.append(-cn[1])
        c.append(cn[: imax + 1])
    return tuple(Fraction(int(x.numerator), int(x.denominator)) for x in E)


def quartic_coeffs(L: int) -> WeakSeries:
    return bender_wu_coeffs(EvenPotential.quartic(), L)


# ---------------------------------------------------------------------------
# strong coupling and real couplings


def b0_sequence(L_max: int, series: WeakSeries | None = None) -> list[dict]:
    """Leading strong-coupling coefficient order by order along real roots.

    Real zeros of ``P`` and of the turning-point polynomial form one pool and
    the zero closest to the previous order's choice is followed, which keeps
    the sequence on the branch that starts at ``sigma = 6`` for ``L = 1``.
    """
    series = series or quartic_coeffs(L_max)
    out, prev = [], None
    for L in range(1, L_max + 1):
        P = sigma_polynomial(series, OSC_GP, L)
        Q = turning_polynomial(series, OSC_GP, L)
        cands = R.candidates(P, Q, L)
        rep = R.select_real_extremum([c for c in cands if c.sigma.real > 0] or cands, previous=prev,
                                     track_all_kinds=True)
        s = rep.chosen.sigma
        prev = s
        b0 = strong_coupling_coefficients(series, OSC_GP, L, s.real, n_terms=0).b[0]
        out.append({"L": L, "sigma": s.real, "b0": b0, "rule": rep.rule_applied})
    return out


def vpt_energy_real(L: int, g, series: WeakSeries | None = None, previous=None):
    """Variational ground-state energy for real ``g > 0`` on a real stationary point."""
    series = series or quartic_coeffs(L)
    g = to_mp(g)
    cands = R.candidates(sigma_polynomial(series, OSC_GP, L), turning_polynomial(series, OSC_GP, L), L)
    rep = R.select_real_extremum(cands, previous=previous)
    s = rep.chosen.sigma.real
    Om = continued_omega(s, g, 3)
    if rep.rule_applied == "real-turning-point":
        Om = _refine_turning(series, L, g, Om)
    return variational_value(series, OSC_GP, L, g, Om), s, rep


def _refine_turning(series, L, g, Omega):
    """Move a strong-coupling turning point to the finite-``g`` zero of ``Z''``."""
    f = lambda w: second_derivative(series, OSC_GP, L, g, w)
    try:
        return mp.findroot(f, Omega)
    except (ValueError, ZeroDivisionError):
        return Omega


def schroedinger_ground_state(g, *, n_basis: int = 120):
    """Ground state of ``-psi''/2 + (x**2/2 + g x**4) psi`` in a harmonic basis.

    Diagonalizes the even-sector matrix of ``x**4`` in the oscillator basis
    with a frequency matched to the coupling; used as an oracle for ``g > 0``.
    """
    g = float(g)
    w = max(1.0, (6 * g) ** (1 / 3) * 1.2)  # trial frequency for fast convergence
    N = 2 * n_basis
    # x = (a + a^dagger)/sqrt(2 w)
    a = np.diag(np.sqrt(np.arange(1, N)), 1)
    x = (a + a.T) / np.sqrt(2 * w)
    p2 = -(w / 2) * (a - a.T) @ (a - a.T)
    x2 = x @ x
    H = p2 / 2 + x2 / 2 + g * x2 @ x2
    H = H[: N - 4, : N - 4]
    even = H[::2, ::2]
    return float(np.linalg.eigvalsh(even)[0])


# ---------------------------------------------------------------------------
# negative couplings


def _upper_rim(series, L, g, sigma):
    """Variational energy at real ``g < 0`` with ``Im E <= 0`` (decay convention)."""
    Om = continued_omega(sigma, g, 3)
    val = variational_value(series, OSC_GP, L, g, Om)
    if mp.im(val) > 0:
        Om = continued_omega(mp.conj(sigma), g, 3)
        val = variational_value(series, OSC_GP, L, g, Om)
    return val


def normalized_log_imag(g, E):
    """``log(sqrt(-pi g / 2) |Im E|) - 1/(3g)``, which tends to 0 as ``g -> 0-``."""
    g = to_mp(g)
    return mp.log(mp.sqrt(-mp.pi * g / 2) * abs(mp.im(E))) - 1 / (3 * g)


@dataclass
class TunnelingSelection:
    L: int
    sigma: object
    report: R.SelectionReport


def select_tunneling_root(L: int, g_grid: Sequence | None = None,
                          series: WeakSeries | None = None) -> TunnelingSelection:
    """Pick the complex stationary point with the smoothest normalized ``Im E``."""
    series = series or quartic_coeffs(L)
    if g_grid is None:
        g_grid = log_grid(-0.2, -0.006, 60)
    cands = [c for c in R.candidates(sigma_polynomial(series, OSC_GP, L), None, L)
             if c.kind == "complex-pair"]
    ev = lambda c, g: _upper_rim(series, L, g, c.sigma)
    rep = R.select_min_oscillation(cands, ev, g_grid, normalized_log_imag)
    return TunnelingSelection(L, rep.chosen.sigma, rep)


def log_grid(g_far, g_near, n: int) -> list:
    """``n`` negative couplings log-spaced from ``g_far`` toward ``g_near``."""
    a, b = mp.log(-to_mp(g_far)), mp.log(-to_mp(g_near))
    return [-mp.exp(a + (b - a) * k / (n - 1)) for k in range(n)]


def tunneling_imag(L: int, g, sigma=None, series: WeakSeries | None = None):
    """Normalized log of ``Im E_0`` at ``g < 0`` for order ``L``.

    Returns ``(f, E)``. Without an explicit ``sigma`` the root is selected by
    :func:`select_tunneling_root` on the default grid.
    """
    g = to_mp(g)
    if not g < 0:
        raise ValueError("tunneling needs g < 0")
    series = series or quartic_coeffs(L)
    if sigma is None:
        sigma = select_tunneling_root(L, series=series).sigma
    E = _upper_rim(series, L, g, sigma)
    return normalized_log_imag(g, E), E


def vpt_energy(L: int, g, root_rule: str = "auto", series: WeakSeries | None = None):
    """Variational ground-state energy at order ``L``.

    ``root_rule`` is ``real`` (real extremum or turning point), ``cluster``
    (medoid of the complex stationary points), ``smooth`` (minimal
    oscillation on the cut) or ``auto``: real for ``g > 0``, smooth for
    ``g < 0``. Returns ``(E, sigma, report)``.
    """
    series = series or quartic_coeffs(L)
    g = to_mp(g)
    if root_rule == "auto":
        root_rule = "real" if mp.re(g) > 0 else "smooth"
    if root_rule == "real":
        return vpt_energy_real(L, g, series)
    if root_rule == "smooth":
        sel = select_tunneling_root(L, series=series)
        rep, sigma = sel.report, sel.sigma
    elif root_rule == "cluster":
        cands = [c for c in R.candidates(sigma_polynomial(series, OSC_GP, L), None, L)
                 if c.kind == "complex-pair"]
        rep = R.select_cluster_middle(cands)
        sigma = rep.chosen.sigma
    else:
        raise ValueError(f"unknown root rule {root_rule!r}")
    if mp.im(g) == 0 and g < 0:
        E = _upper_rim(series, L, g, sigma)
    else:
        E = variational_value(series, OSC_GP, L, g, continued_omega(sigma, g, 3))
    return E, sigma, rep


SEMICLASSICAL_B = (mp.mpf(95) / 24, mp.mpf(619) / 32, mp.mpf(200689) / 1152, mp.mpf(2229541) / 1024)


def _poly_fit(gs, fs, degree):
    A = mp.matrix([[g ** (d + 1) for d in range(degree)] for g in gs])
    coef = mp.qr_solve(A, mp.matrix(fs))[0]
    return [coef[d] * (-1) ** d for d in range(degree)]


def tunneling_fit(L: int, window=(-0.0229, -0.006), n_points: int = 61, sigma=None,
                  degree: int | None = None, degrees=range(3, 9), jitter=0.0003) -> dict:
    """Fit ``f(g) = b1 g - b2 g**2 + b3 g**3 - ...`` on a window of negative couplings.

    The polynomial has no constant term. With ``degree=None`` every degree in
    ``degrees`` is tried and the one whose ``b1`` moves least when the lower
    window edge shifts by ``+-jitter`` is kept. The spread is reported as
    ``b1_jitter``.
    """
    series = quartic_coeffs(L)
    if sigma is None:
        sigma = select_tunneling_root(L, series=series).sigma
    lo, hi = (to_mp(w) for w in window)
    jit = to_mp(jitter)
    lo_ext = lo - jit
    gs = [lo_ext + (hi - lo_ext) * k / (n_points - 1) for k in range(n_points)]
    fs = [tunneling_imag(L, g, sigma, series)[0] for g in gs]
    edges = (lo + jit, lo, lo - jit)

    def fit_on(edge, d):
        pts = [(g, f) for g, f in zip(gs, fs) if g >= edge - mp.mpf(10) ** -15]
        return _poly_fit([p[0] for p in pts], [p[1] for p in pts], d)

    table = {}
    for d in ([degree] if degree else list(degrees)):
        fits = [fit_on(e, d) for e in edges]
        b1s = [f[0] for f in fits]
        table[d] = {"b": fits[1], "b1_jitter": max(b1s) - min(b1s)}
    best = min(table, key=lambda d: (table[d]["b1_jitter"], d))
    return {"L": L, "sigma": sigma, "degree": best, "b": table[best]["b"],
            "b1_jitter": table[best]["b1_jitter"], "by_degree": table,
            "window": (lo, hi), "g": gs, "f": fs}


# ---------------------------------------------------------------------------
# large-order behaviour and the bubble expansion

BETA_EXACT = (Fraction(3), Fraction(-3, 2), Fraction(95, 24), Fraction(113, 6),
              Fraction(391691, 3456), Fraction(40783, 48), Fraction(1915121357, 248832),
              Fraction(10158832895, 124416))


def large_order_ratios(series: WeakSeries, window=(250, 300), n_beta: int = 14) -> dict:
    """Least-squares fit of ``a_l/a_{l-1} = -sum_{j>=-1} beta_j l**(-j)`` on a window.

    Ratios are formed exactly and the fit is done at the working precision.
    Returns ``beta`` (index 0 is ``beta_{-1}``) and the design-matrix condition
    number.
    """
    lo, hi = window
    if hi > series.order:
        raise ValueError(f"window reaches l={hi}, series known to {series.order}")
    a = series.coeffs
    ls = list(range(lo + 1, hi + 1))
    rows = [[mp.mpf(l) ** (1 - j) for j in range(n_beta)] for l in ls]
    y = [-to_mp(Fraction(a[l]) / Fraction(a[l - 1])) for l in ls]
    A = mp.matrix(rows)
    # column scaling keeps the normal equations well conditioned
    scale = [mp.mpf(hi) ** (1 - j) for j in range(n_beta)]
    As = mp.matrix([[rows[i][j] / scale[j] for j in range(n_beta)] for i in range(len(ls))])
    coef, res = mp.qr_solve(As, mp.matrix(y))
    beta = [coef[j] / scale[j] for j in range(n_beta)]
    sv = mp.svd_r(As, compute_uv=False)
    cond = max(sv) / min(sv)
    return {"beta": beta, "residual": res, "condition": cond}


@dataclass
class BubbleExpansion:
    """``E(g) = g**alpha exp(1/(3g) - sum_k b_k (-g)**k)``."""

    alpha: Fraction
    b: list
    beta: list = field(default_factory=list)


def _bubble_residual(beta: Sequence, unknowns: Sequence, N: int) -> list:
    """Coefficients of the ODE residual after inserting the ansatz.

    With ``theta = g d/dg``, ``D = theta log E = d(g)/g`` and the ladders
    ``theta**n E = g**-n p_n E``, ``(theta+1)**j E = g**-j r_j E``, the equation
    times ``g**J`` becomes ``p_J + sum_j beta_{J-j} g**(J+1-j) r_j = 0``.
    """
    zero = beta[0] * 0
    J = len(beta) - 2
    d = [zero] * (N + 1)
    d[0] = zero - Fraction(1, 3)
    if unknowns and N >= 1:
        d[1] += unknowns[0]
    for k, bk in enumerate(unknowns[1:], 1):
        if k + 1 <= N:
            d[k + 1] -= k * bk * (-1) ** k

    def step(p, n, shifted):
        out = [zero] * (N + 1)
        for i, x in enumerate(p):
            if i + 1 <= N:
                out[i + 1] += (i - n) * x
        dd = list(d)
        if shifted and N >= 1:
            dd[1] += 1
        for i, x in enumerate(dd):
            if x == 0:
                continue
            for j in range(N + 1 - i):
                out[i + j] += x * p[j]
        return out

    p = [zero + 1] + [zero] * N
    for n in range(J):
        p = step(p, n, False)
    total = list(p)
    r = [zero + 1] + [zero] * N
    for j in range(J + 2):
        coef = beta[J - j + 1]
        sh = J + 1 - j
        for i in range(N + 1 - sh):
            total[i + sh] += coef * r[i]
        if j < J + 1:
            r = step(r, j, True)
    return total


def bubble_from_recurrence(beta: Sequence = BETA_EXACT, n_terms: int | None = None) -> BubbleExpansion:
    """Match the ansatz to the recurrence ODE order by order.

    ``beta[0]`` is ``beta_{-1}``. Each order of the residual is affine in one
    new unknown (first ``alpha``, then ``b_1``, ``b_2``, ...), so two
    evaluations determine it exactly. Returns ``alpha`` and ``b_1..b_K`` with
    ``K = len(beta) - 2`` unless ``n_terms`` is smaller.
    """
    beta = list(beta)
    J = len(beta) - 2
    N = J + 1
    K = J if n_terms is None else min(n_terms, J)
    lead = _bubble_residual(beta, [], N)[0]
    if lead != 0:
        raise ArithmeticError(f"leading order inconsistent: beta_-1 = {beta[0]} (needs 3)")
    unk = []
    for m in range(1, K + 2):
        r0 = _bubble_residual(beta, unk + [0], N)[m]
        r1 = _bubble_residual(beta, unk + [1], N)[m]
        if r1 == r0:
            raise ArithmeticError(f"order {m}: no unknown enters")
        unk.append(-r0 / (r1 - r0))
    return BubbleExpansion(alpha=unk[0], b=unk[1:], beta=beta)
