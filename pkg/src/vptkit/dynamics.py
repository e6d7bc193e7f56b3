"""Eigenvalue flow in the coupling constant.

For ``H = p**2/2 + x**2/2 + g x**4`` the energies ``E_n(g)`` and matrix
elements ``V_mn(g) = <n(g)|x**4|m(g)>`` obey a closed first-order system in
``g``.  Truncating to the lowest even levels and integrating along a path
that goes out along the real axis and then around a half circle reaches the
upper rim of the cut at negative ``g``, where ``Im E_0`` is the tunneling
width.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

__all__ = ["SpectralState", "DegeneracyError", "PathIntegrationError", "initial_state",
           "flow_rhs", "integrate_path", "taylor_fit_real_axis", "write_trace_csv",
           "truncated_spectrum"]


class DegeneracyError(ArithmeticError):
    """Two coupled levels came closer than the degeneracy tolerance."""


class PathIntegrationError(RuntimeError):
    """The adaptive integrator failed along the coupling path."""


@dataclass(frozen=True)
class SpectralState:
    """Energies and ``x**4`` matrix elements of the even sector at coupling ``g``.

    ``energies[n]`` belongs to level ``2n``; ``V[n, m]`` to ``<2n|x**4|2m>``.
    """

    energies: np.ndarray
    V: np.ndarray
    g: complex

    @property
    def size(self) -> int:
        return len(self.energies)

    def pack(self) -> np.ndarray:
        iu = np.triu_indices(self.size)
        return np.concatenate([self.energies, self.V[iu]]).astype(complex)

    @classmethod
    def unpack(cls, y: np.ndarray, size: int, g: complex) -> "SpectralState":
        E = np.array(y[:size])
        V = np.zeros((size, size), dtype=complex)
        iu = np.triu_indices(size)
        V[iu] = y[size:]
        V = V + np.triu(V, 1).T
        return cls(E, V, g)

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.V - self.V.T)))


def initial_state(N: int) -> SpectralState:
    """Harmonic levels ``2n`` for ``n = 0 .. N/2`` and their ``x**4`` elements."""
    if N % 2 or N < 4:
        raise ValueError(f"N must be even and at least 4, got {N}")
    M = N // 2 + 1
    E = np.array([2 * n + 0.5 for n in range(M)], dtype=complex)
    V = np.zeros((M, M), dtype=complex)
    for n in range(M):
        V[n, n] = 3 * (8 * n * n + 4 * n + 1) / 4
        if n + 1 < M:
            V[n, n + 1] = V[n + 1, n] = (4 * n + 3) * math.sqrt((2 * n + 1) * (2 * n + 2)) / 2
        if n + 2 < M:
            v = math.sqrt((2 * n + 1) * (2 * n + 2) * (2 * n + 3) * (2 * n + 4)) / 4
            V[n, n + 2] = V[n + 2, n] = v
    return SpectralState(E, V, 0j)


def _derivative(E: np.ndarray, V: np.ndarray, rel_tol: float = 1e-10):
    gap = E[:, None] - E[None, :]
    np.fill_diagonal(gap, np.inf)
    floor = rel_tol * np.max(np.abs(E))
    close = np.abs(gap) < floor
    if close.any():
        m, k = np.argwhere(close)[0]
        raise DegeneracyError(f"levels {2 * m} and {2 * k} are degenerate (|dE| < {floor:.3g})")
    R = 1.0 / gap                        # R[m, k] = 1/(E_m - E_k), zero on the diagonal
    np.fill_diagonal(R, 0.0)
    # sum_k V_mk V_kn / (E_m - E_k) is (R*V) @ V; the second sum is its transpose
    A = (V * R) @ V
    return np.diag(V).copy(), A + A.T


def flow_rhs(state: SpectralState) -> SpectralState:
    """``dE/dg`` and ``dV/dg`` at ``state``, returned as a state with the same ``g``."""
    dE, dV = _derivative(state.energies, state.V)
    return SpectralState(dE, dV, state.g)


def _integrate(state: SpectralState, g_of_t, dg_dt, t_span, rtol, atol, trace):
    M = state.size
    iu = np.triu_indices(M)

    def rhs(t, y):
        E = y[:M]
        V = np.zeros((M, M), dtype=complex)
        V[iu] = y[M:]
        V = V + np.triu(V, 1).T
        dE, dV = _derivative(E, V)
        return np.concatenate([dE, dV[iu]]) * dg_dt(t)

    sol = solve_ivp(rhs, t_span, state.pack(), method="DOP853", rtol=rtol, atol=atol,
                    dense_output=False)
    if not sol.success:
        raise PathIntegrationError(f"{sol.message} at g = {g_of_t(sol.t[-1])}")
    if trace is not None:
        for t, y in zip(sol.t, sol.y.T):
            trace.append((g_of_t(t), y[0]))
    return SpectralState.unpack(sol.y[:, -1], M, g_of_t(t_span[1]))


def integrate_path(N: int, g_target: float, tolerance: float = 1e-10,
                   trace: list | None = None) -> SpectralState:
    """Integrate the truncated flow from ``g = 0`` to ``g_target``.

    Positive targets are reached along the real axis. For negative targets
    the path runs to ``|g_target|`` and then along ``g = |g| exp(i phi)`` with
    ``phi`` from 0 to ``pi``, ending on the upper rim of the cut. ``trace``,
    if given, collects ``(g, E_0)`` at every accepted step.
    """
    g_target = float(g_target)
    state = initial_state(N)
    r = abs(g_target)
    if r == 0:
        return state
    kw = dict(rtol=tolerance, atol=tolerance * 1e-3, trace=trace)
    state = _integrate(state, lambda t: complex(t), lambda t: 1.0, (0.0, r), **kw)
    if g_target > 0:
        return state
    return _integrate(state, lambda t: r * complex(math.cos(t), math.sin(t)),
                      lambda t: 1j * r * complex(math.cos(t), math.sin(t)), (0.0, math.pi), **kw)


def write_trace_csv(path, trace) -> None:
    """Write ``(Re g, Im g, Re E0, Im E0)`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_g", "im_g", "re_E0", "im_E0"])
        for g, e in trace:
            w.writerow([repr(g.real), repr(g.imag), repr(e.real), repr(e.imag)])


def taylor_fit_real_axis(N: int, g_max: float = 0.05, n_points: int = 11,
                         degree: int = 6) -> np.ndarray:
    """Polynomial coefficients of ``E_0(g)`` fitted on ``[0, g_max]``.

    Returns ``c[0..degree]`` in ascending powers of ``g``.
    """
    gs = np.linspace(0.0, g_max, n_points)
    E0 = []
    state = initial_state(N)
    prev = 0.0
    for g in gs:
        if g > prev:
            state = _integrate(state, lambda t: complex(t), lambda t: 1.0, (prev, g),
                               rtol=1e-13, atol=1e-15, trace=None)
        E0.append(state.energies[0].real)
        prev = g
    return np.polynomial.polynomial.polyfit(gs, np.array(E0), degree)


def truncated_spectrum(N: int, g: complex) -> np.ndarray:
    """Eigenvalues of ``H0 + g V`` restricted to the same even levels as the flow.

    The truncated flow is the eigenvalue flow of this finite matrix, so any
    endpoint of ``integrate_path`` must appear here.
    """
    s = initial_state(N)
    return np.linalg.eigvals(np.diag(s.energies) + g * s.V)
