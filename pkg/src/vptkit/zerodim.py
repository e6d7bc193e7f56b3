"""Variational approximants of the zero-dimensional model.

``Z(g) = pi**-1/2 int exp(-x**2 - g x**4) dx`` behaves like ``g**(-1/4)`` at
strong coupling with corrections in powers of ``g**(-1/2)``, so ``p = -1`` and
``q = 4``. Positive couplings use real stationary points; on the cut
``g < 0`` a complex pair is chosen by one of the complex rules.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath as mp
import numpy as np

from . import roots as R
from .models_exact import zerodim_exact, zerodim_weak_coeffs
from .oscillator import log_grid
from .series import (GrowthParams, WeakSeries, continued_omega, sigma_polynomial, to_mp,
                     turning_polynomial, variational_value)

ZERODIM_GP = GrowthParams(-1, 4)


def upper_rim_value(series: WeakSeries, L: int, g, sigma):
    """``Z_var`` at real ``g < 0`` on the upper rim, where ``Im Z < 0``."""
    g = to_mp(g)
    val = variational_value(series, ZERODIM_GP, L, g, continued_omega(sigma, g, 4))
    if mp.im(val) > 0:
        val = variational_value(series, ZERODIM_GP, L, g, continued_omega(mp.conj(sigma), g, 4))
    return val


def normalized_log_imag(g, Z):
    """``log(sqrt(2) (-g)**(1/4) |Im Z|) - 1/(4g)``.

    The essential singularity is removed; for the exact ``Z`` what remains
    drifts like ``log(-g)/4`` as ``g -> 0-``.
    """
    g = to_mp(g)
    return mp.log(mp.sqrt(2) * (-g) ** (mp.mpf(1) / 4) * abs(mp.im(Z))) - 1 / (4 * g)


def complex_candidates(series: WeakSeries, L: int) -> list:
    P = sigma_polynomial(series, ZERODIM_GP, L)
    return [c for c in R.candidates(P, None, L) if c.kind == "complex-pair"]


def select_root(L: int, rule: str = "real", *, series: WeakSeries | None = None,
                g_grid: Sequence | None = None, previous=None) -> R.SelectionReport:
    """Stationary point of order ``L`` by ``real``, ``cluster`` or ``smooth`` selection.

    ``smooth`` is the minimal-oscillation rule on ``g_grid`` (default 60
    log-spaced couplings from -2 toward -0.01).
    """
    series = series or zerodim_weak_coeffs(L)
    if rule == "real":
        cands = R.candidates(sigma_polynomial(series, ZERODIM_GP, L),
                             turning_polynomial(series, ZERODIM_GP, L), L)
        return R.select_real_extremum(cands, previous=previous)
    cands = complex_candidates(series, L)
    if not cands:
        raise R.NoRealRootError(f"no complex stationary points at L={L}")
    if rule == "cluster":
        return R.select_cluster_middle(cands)
    if rule == "smooth":
        grid = g_grid if g_grid is not None else log_grid(-2, -0.01, 60)
        ev = lambda c, g: upper_rim_value(series, L, g, c.sigma)
        return R.select_min_oscillation(cands, ev, grid, normalized_log_imag)
    raise ValueError(f"unknown rule {rule!r}")


def zerodim_vpt(L: int, g, sigma, series: WeakSeries | None = None):
    """``Z_var`` at coupling ``g`` for a given stationary point ``sigma``."""
    series = series or zerodim_weak_coeffs(L)
    g = to_mp(g)
    if mp.im(g) == 0 and g < 0:
        return upper_rim_value(series, L, g, sigma)
    return variational_value(series, ZERODIM_GP, L, g, continued_omega(sigma, g, 4))


@dataclass(frozen=True)
class ConvergenceRow:
    L: int
    sigma: object
    rule: str
    value: object
    exact: object
    error: object


def convergence_study(g, orders: Sequence, rule: str = "real") -> list:
    """``|Z_var - Z|`` order by order at a fixed coupling."""
    g = to_mp(g)
    orders = list(orders)
    if not orders:
        return []
    series = zerodim_weak_coeffs(max(orders))
    exact = zerodim_exact(g)[0]
    rows = []
    for L in orders:
        rep = select_root(L, rule, series=series)
        val = zerodim_vpt(L, g, rep.chosen.sigma, series)
        rows.append(ConvergenceRow(L, rep.chosen.sigma, rep.rule_applied, val, exact, abs(val - exact)))
    return rows


def log_error_slope(rows: Sequence) -> tuple:
    """``(slope, intercept)`` of ``log|error|`` against ``L``."""
    x = np.array([r.L for r in rows], dtype=float)
    y = np.array([float(mp.log(r.error)) for r in rows])
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), float(icpt)


@dataclass(frozen=True)
class CutRow:
    g: object
    value: object
    exact: object
    rel_re: float
    rel_im: float


def cut_study(L: int = 16, g_values: Sequence | None = None, rule: str = "smooth") -> tuple:
    """Compare ``Z_var`` with the exact continuation along the cut.

    Returns ``(report, rows)``; the root is chosen once and reused for every ``g``.
    """
    series = zerodim_weak_coeffs(L)
    rep = select_root(L, rule, series=series)
    g_values = list(g_values) if g_values is not None else log_grid(-2, -0.01, 40)
    rows = []
    for g in g_values:
        v = upper_rim_value(series, L, g, rep.chosen.sigma)
        e = zerodim_exact(g)[0]
        rows.append(CutRow(to_mp(g), v, e, float(abs(mp.re(v) - mp.re(e)) / abs(mp.re(e))),
                           float(abs(mp.im(v) - mp.im(e)) / abs(mp.im(e)))))
    return rep, rows


__all__ = ["ConvergenceRow", "CutRow", "ZERODIM_GP", "complex_candidates", "convergence_study",
           "cut_study", "log_error_slope", "normalized_log_imag", "select_root", "upper_rim_value",
           "zerodim_vpt"]
