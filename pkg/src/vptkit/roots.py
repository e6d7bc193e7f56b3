"""Complex roots of optimality polynomials and rules for choosing among them."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import mpmath as mp
import numpy as np

from .series import poly_derivative, polyval, to_mp

KINDS = ("real-first-derivative", "real-second-derivative", "complex-pair")
RULES = ("real-extremum", "real-turning-point", "cluster-middle", "min-oscillation")


class RootFindingError(ArithmeticError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial or []


class NoRealRootError(LookupError):
    """No real zero of either derivative: the complex rules must be used."""


@dataclass
class RootCandidate:
    sigma: complex
    kind: str
    order_L: int
    residual: float

    def to_dict(self):
        s = mp.mpc(self.sigma)
        return {"sigma_re": mp.nstr(s.real, 20), "sigma_im": mp.nstr(s.imag, 20),
                "kind": self.kind, "order_L": self.order_L,
                "residual": mp.nstr(self.residual, 5)}


@dataclass
class SelectionReport:
    chosen: RootCandidate
    all_candidates: list
    rule_applied: str
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> str:
        diag = {k: (mp.nstr(v, 12) if isinstance(v, (mp.mpf, mp.mpc)) else v)
                for k, v in self.diagnostics.items()}
        return json.dumps({"chosen": self.chosen.to_dict(),
                           "all_candidates": [c.to_dict() for c in self.all_candidates],
                           "rule_applied": self.rule_applied,
                           "diagnostics": diag}, sort_keys=True)


def _trim(coeffs: Sequence) -> list:
    c = [to_mp(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return c


def _polish(c: list, z, steps: int = 30):
    dc = poly_derivative(c)
    for _ in range(steps):
        d = polyval(dc, z)
        if d == 0:
            break
        dz = polyval(c, z) / d
        z -= dz
        if abs(dz) <= mp.eps * 4 * (1 + abs(z)):
            break
    return z


def _companion_seeds(c: list) -> list:
    """Double-precision eigenvalue seeds for a polynomial rescaled to unit root size."""
    n = len(c) - 1
    rho = mp.root(abs(c[0] / c[-1]), n) if c[0] != 0 else mp.mpf(1)
    if rho == 0:
        rho = mp.mpf(1)
    scaled = [complex(c[k] * rho**k / c[-1]) for k in range(n + 1)]
    if not all(np.isfinite(scaled)):
        raise OverflowError("coefficients out of double range")
    seeds = np.roots(scaled[::-1])
    return [mp.mpc(complex(z)) * rho for z in seeds]


def _aberth(c: list, z: list, maxiter: int = 200) -> list | None:
    """Aberth-Ehrlich simultaneous iteration; returns None on non-convergence."""
    dc = poly_derivative(c)
    n = len(z)
    tol = mp.mpf(2) ** (-(3 * mp.mp.prec) // 4)
    done = False
    for _ in range(maxiter):
        worst = mp.mpf(0)
        for i in range(n):
            d = polyval(dc, z[i])
            if d == 0:
                z[i] += tol * (1 + abs(z[i]))
                continue
            ratio = polyval(c, z[i]) / d
            rep = sum(1 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j])
            step = ratio / (1 - ratio * rep)
            z[i] -= step
            worst = max(worst, abs(step) / (1 + abs(z[i])))
        if done:
            return z
        # one extra sweep after convergence squeezes out the remaining bits
        done = worst <= tol
    return None


def all_roots(coeffs: Sequence, *, maxsteps: int = 400) -> list:
    """All complex roots of an ascending coefficient list.

    Aberth-Ehrlich iteration at the working precision, seeded by numpy
    companion-matrix eigenvalues of the rescaled polynomial. If that fails the
    Durand-Kerner solver from mpmath is used. Real-coefficient input returns
    exact conjugate pairs.
    """
    c = _trim(coeffs)
    if len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    real_input = all(mp.im(x) == 0 for x in c)
    # zero roots factor out exactly
    nzero = 0
    while c[0] == 0:
        c.pop(0)
        nzero += 1
    roots = []
    if len(c) >= 2:
        found = None
        try:
            found = _aberth(c, _companion_seeds(c))
        except (OverflowError, ZeroDivisionError, np.linalg.LinAlgError):
            found = None
        if found is None:
            try:
                found = [mp.mpc(r) for r in mp.polyroots(list(reversed(c)), maxsteps=maxsteps,
                                                         extraprec=max(mp.mp.prec, 20 * len(c)))]
            except mp.libmp.NoConvergence as exc:
                raise RootFindingError("root iteration did not converge") from exc
        roots = [mp.mpc(r) for r in found]
    roots += [mp.mpc(0)] * nzero
    if real_input:
        roots = _symmetrize(roots)
    return roots


def _symmetrize(roots: list) -> list:
    """Snap numerically real roots onto the axis and pair the rest as conjugates."""
    tol = mp.mpf(2) ** (-mp.mp.prec // 2)
    out, upper = [], []
    for r in roots:
        if abs(r.imag) <= tol * (1 + abs(r)):
            out.append(mp.mpc(r.real, 0))
        elif r.imag > 0:
            upper.append(r)
    for r in upper:
        out.append(r)
        out.append(mp.conj(r))
    if len(out) != len(roots):
        return roots
    return out


def real_roots(coeffs: Sequence) -> list:
    return sorted([r.real for r in all_roots(coeffs) if r.imag == 0])


def candidates(poly: Sequence, poly_second: Sequence | None, L: int) -> list[RootCandidate]:
    """Classify roots of the first-derivative polynomial and turning-point polynomial.

    Complex pairs are stored once, with nonnegative imaginary part.
    """
    out = []
    P = _trim(poly)
    if len(P) >= 2:
        for r in all_roots(P):
            if r.imag == 0:
                out.append(RootCandidate(mp.mpc(r), "real-first-derivative", L, abs(polyval(P, r))))
            elif r.imag > 0:
                out.append(RootCandidate(r, "complex-pair", L, abs(polyval(P, r))))
    if poly_second is not None:
        Q = _trim(poly_second)
        if len(Q) >= 2:
            for r in all_roots(Q):
                if r.imag == 0:
                    out.append(RootCandidate(mp.mpc(r), "real-second-derivative", L, abs(polyval(Q, r))))
    return out


def _tie_key(c: RootCandidate):
    return (abs(mp.mpc(c.sigma).imag), abs(c.sigma))


def select_real_extremum(cands: list[RootCandidate], previous=None, *,
                         track_all_kinds: bool = False) -> SelectionReport:
    """Prefer real first-derivative zeros, else real turning points.

    Among several, take the one closest to ``previous`` (the choice at the
    preceding order) or, without history, the smallest ``|sigma|``. With
    ``track_all_kinds`` both kinds form one pool, so the branch followed from
    order to order may alternate between extrema and turning points.
    """
    def pick(pool, rule):
        if previous is not None:
            chosen = min(pool, key=lambda c: (abs(c.sigma - previous), c.kind) + _tie_key(c))
        else:
            chosen = min(pool, key=lambda c: (abs(c.sigma), c.kind) + _tie_key(c))
        if rule is None:
            rule = "real-extremum" if chosen.kind == "real-first-derivative" else "real-turning-point"
        return SelectionReport(chosen, list(cands), rule, {"pool_size": len(pool)})

    if track_all_kinds:
        pool = [c for c in cands if c.kind != "complex-pair"]
        if pool:
            return pick(pool, None)
    else:
        for kind, rule in (("real-first-derivative", "real-extremum"),
                           ("real-second-derivative", "real-turning-point")):
            pool = [c for c in cands if c.kind == kind]
            if pool:
                return pick(pool, rule)
    raise NoRealRootError("no real zeros of either derivative; use complex rules")


def select_cluster_middle(sigmas: list) -> SelectionReport:
    """Medoid of the densest neighbourhood of a set of complex candidates.

    The neighbourhood radius is the median pairwise distance. The candidate
    with the most neighbours inside that radius seeds the cluster; the member
    minimizing the summed distance to the others is returned.
    """
    if not sigmas:
        raise ValueError("no candidates")
    cands = [s if isinstance(s, RootCandidate) else RootCandidate(mp.mpc(s), "complex-pair", 0, 0)
             for s in sigmas]
    z = [mp.mpc(c.sigma) for c in cands]
    n = len(z)
    if n == 1:
        return SelectionReport(cands[0], cands, "cluster-middle", {"cluster": [0]})
    dist = [[abs(z[i] - z[j]) for j in range(n)] for i in range(n)]
    pair = sorted(dist[i][j] for i in range(n) for j in range(i + 1, n))
    m = len(pair)
    radius = pair[m // 2] if m % 2 else (pair[m // 2 - 1] + pair[m // 2]) / 2
    counts = [sum(1 for j in range(n) if dist[i][j] <= radius) for i in range(n)]
    best = max(counts)
    seeds = [i for i in range(n) if counts[i] == best]
    seed = min(seeds, key=lambda i: (sum(dist[i]),) + _tie_key(cands[i]))
    members = [j for j in range(n) if dist[seed][j] <= radius]
    med = min(members, key=lambda i: (sum(dist[i][j] for j in members),) + _tie_key(cands[i]))
    return SelectionReport(cands[med], cands, "cluster-middle",
                           {"cluster": members, "radius": radius})


def oscillation_score(values: Sequence) -> float:
    """Total variation past the first sign flip of the second difference.

    ``values`` are ordered from the far end of the grid toward the
    singularity. A curve without curvature flips scores zero.
    """
    v = [float(x) for x in values]
    if len(v) < 3:
        return 0.0
    d2 = [v[i + 2] - 2 * v[i + 1] + v[i] for i in range(len(v) - 2)]
    sign0 = next((np.sign(x) for x in d2 if x != 0), 0)
    flip = None
    for i, x in enumerate(d2):
        if sign0 and np.sign(x) == -sign0:
            flip = i
            break
    if flip is None:
        return 0.0
    tail = v[flip + 1:]
    return float(sum(abs(tail[i + 1] - tail[i]) for i in range(len(tail) - 1)))


def monotone_extent(g_grid: Sequence, values: Sequence):
    """Closest-to-zero coupling reached before the curve first turns back."""
    if len(values) < 2:
        return g_grid[0] if g_grid else None
    s0 = np.sign(values[1] - values[0])
    last = g_grid[1]
    for i in range(1, len(values) - 1):
        if np.sign(values[i + 1] - values[i]) not in (s0, 0):
            return g_grid[i]
        last = g_grid[i + 1]
    return last


def select_min_oscillation(cands: list, evaluator: Callable, g_grid: Sequence,
                           normalizer: Callable, *, tie_rtol: float = 1e-3) -> SelectionReport:
    """Choose the candidate whose normalized curve oscillates least.

    ``evaluator(candidate, g)`` returns the model value; ``normalizer(g, value)``
    maps it to the smooth quantity that is scored. The grid runs toward
    ``0-``. Failing candidates are disqualified and listed in the report.
    Scores within ``tie_rtol`` of the best count as tied; ties go to the
    medoid of the tied group.
    """
    if not cands:
        raise ValueError("no candidates")
    cands = [c if isinstance(c, RootCandidate) else RootCandidate(mp.mpc(c), "complex-pair", 0, 0)
             for c in cands]
    order = sorted(range(len(cands)), key=lambda i: (mp.nstr(mp.mpc(cands[i].sigma).real, 30),
                                                      mp.nstr(mp.mpc(cands[i].sigma).imag, 30)))
    scores, extents, failures = {}, {}, {}
    for i in order:
        try:
            vals = [normalizer(g, evaluator(cands[i], g)) for g in g_grid]
            if not all(mp.isfinite(v) for v in vals):
                raise ArithmeticError("non-finite value")
        except Exception as exc:  # disqualify, keep going
            failures[i] = str(exc)
            continue
        scores[i] = oscillation_score(vals)
        extents[i] = float(monotone_extent(g_grid, vals))
    if not scores:
        raise ArithmeticError("every candidate failed on the grid")
    top = min(scores.values())
    tied = sorted(i for i in scores if scores[i] <= top * (1 + tie_rtol) + 1e-300)
    if len(tied) > 2:
        z = {i: mp.mpc(cands[i].sigma) for i in tied}
        best = min(tied, key=lambda i: (sum(abs(z[i] - z[j]) for j in tied),) + _tie_key(cands[i]))
    else:
        best = min(tied, key=lambda i: (scores[i], abs(extents[i])) + _tie_key(cands[i]))
    return SelectionReport(cands[best], cands, "min-oscillation",
                           {"tied": tied,
                            "scores": {str(k): v for k, v in sorted(scores.items())},
                            "monotone_extent": {str(k): v for k, v in sorted(extents.items())},
                            "failures": {str(k): v for k, v in sorted(failures.items())}})
