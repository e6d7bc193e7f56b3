"""Exactly solvable reference models used as oracles for the engine.

The zero-dimensional model is ``Z(g) = pi**-1/2 * int exp(-x**2 - g x**4) dx``,
normalized so that ``Z(0) = 1``.
The large-N amplitude is ``sum_l a_l z**l`` with ``a_l = int K(x) f(x)**l dx``
for a normalized kernel ``K`` and a decreasing profile ``f``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import mpmath as mp
import numpy as np
from scipy.optimize import curve_fit

from .roots import all_roots
from .series import WeakSeries, generalized_binomial, to_mp

# ---------------------------------------------------------------------------
# zero-dimensional model

NU = mp.mpf(1) / 4


def _bessel_form(g):
    """``exp(z) K_{1/4}(z) / sqrt(4 pi g)`` with ``z = 1/(8g)``, principal branches."""
    z = 1 / (8 * g)
    return mp.exp(z) * mp.besselk(NU, z) / mp.sqrt(4 * mp.pi * g)


def zerodim_quadrature(g):
    """Quadrature of the defining integral along a contour rotated with ``arg g``.

    For ``g = |g| exp(i theta)`` with ``|theta| <= pi`` the substitution
    ``x = exp(-i theta/4) y`` keeps the quartic damping real, so the boundary
    value on the upper rim of the cut is reached at ``theta = pi``.
    """
    g = mp.mpmathify(g)
    r, th = abs(g), mp.arg(g)
    rot = mp.exp(-1j * th / 2)
    f = lambda y: mp.exp(-rot * y**2 - r * y**4)
    if r == 0:
        return mp.mpf(1)
    # scale for the quartic tail
    s = max(mp.mpf(1), r ** (-mp.mpf(1) / 4))
    val = 2 * mp.quad(f, [0, s, 2 * s, 4 * s, 8 * s, mp.inf])
    out = mp.exp(-1j * th / 4) * val / mp.sqrt(mp.pi)
    return out.real if th == 0 else out


def zerodim_exact(g, *, check: bool = True, upper_rim: bool = True):
    """Exact ``Z(g)``.

    Real ``g > 0`` uses the Bessel closed form and, when ``check`` is set,
    asserts agreement with direct quadrature to 1e-12. Real ``g < 0`` returns
    the boundary value on the upper rim of the cut (lower rim with
    ``upper_rim=False``), obtained by rotating the Bessel argument through
    ``-pi``. Complex ``g`` off the negative axis uses principal branches.
    Returns ``(value, flag)`` where ``flag`` is ``"limit"`` at ``g = 0``.
    """
    g = mp.mpmathify(g)
    if g == 0:
        return mp.mpf(1), "limit"
    if mp.im(g) == 0 and mp.re(g) > 0:
        val = _bessel_form(mp.re(g))
        if check:
            quad = zerodim_quadrature(mp.re(g))
            if abs(val - quad) > mp.mpf(10) ** -12 * abs(val):
                raise ArithmeticError(f"Bessel and quadrature disagree at g={g}: {val} vs {quad}")
        return mp.re(val), "exact"
    if mp.im(g) == 0 and mp.re(g) < 0:
        val = zerodim_on_cut(-mp.re(g))
        return (val if upper_rim else mp.conj(val)), "continued"
    return _bessel_form(g), "exact"


def zerodim_on_cut(h):
    """``Z(h exp(i pi))`` for ``h > 0`` via the rotation formula of ``K_nu``.

    ``K_nu(z exp(-i pi)) = exp(i nu pi) K_nu(z) + i pi I_nu(z)``.
    """
    h = mp.mpf(h)
    z = 1 / (8 * h)
    k_rot = mp.exp(1j * NU * mp.pi) * mp.besselk(NU, z) + 1j * mp.pi * mp.besseli(NU, z)
    sqrt_g = mp.sqrt(h) * 1j
    return mp.exp(-z) * k_rot / (mp.sqrt(4 * mp.pi) * sqrt_g)


def zerodim_weak_coeffs(L: int) -> WeakSeries:
    """Weak-coupling coefficients through ``g**L`` by the ratio recursion.

    ``a_{l+1} = -(16 l (l+1) + 3) / (4 (l+1)) a_l`` with ``a_0 = 1``.
    """
    a = [Fraction(1)]
    for l in range(L):
        a.append(-Fraction(16 * l * (l + 1) + 3, 4 * (l + 1)) * a[-1])
    return WeakSeries(tuple(a), "g", "Z = pi^-1/2 int exp(-x^2 - g x^4)")


def zerodim_weak_closed(l: int) -> Fraction:
    """``(-1)**l Gamma(2l + 1/2) / (l! sqrt(pi))`` as an exact rational.

    ``Gamma(2l + 1/2)/sqrt(pi) = (4l)! / (4**(2l) (2l)!)``.
    """
    return Fraction((-1) ** l * factorial(4 * l), 16**l * factorial(2 * l) * factorial(l))


def zerodim_strong_coeffs(L: int) -> list:
    """Strong-coupling coefficients ``b_0..b_L`` from the Gamma-function form.

    ``Z(g) = sum_l b_l g**(-1/4 - l/2)`` with
    ``b_l = (-1)**l Gamma(l/2 + 1/4) / (2 l! sqrt(pi))``.
    """
    return [(-1) ** l * mp.gamma(mp.mpf(l) / 2 + NU) / (2 * mp.factorial(l) * mp.sqrt(mp.pi))
            for l in range(L + 1)]


def zerodim_strong_ratios(L: int) -> list[Fraction]:
    """Exact ratios ``b_l / b_{l mod 2}`` from ``b_{l+2} = (2l+1) b_l / (4 (l+1)(l+2))``."""
    r = [Fraction(1), Fraction(1)]
    for l in range(L - 1):
        r.append(r[l] * Fraction(2 * l + 1, 4 * (l + 1) * (l + 2)))
    return r[: L + 1]


def zerodim_strong_ratios_closed(L: int) -> list[Fraction]:
    """Same ratios from the Gamma form, using ``Gamma(x+n)/Gamma(x)`` as a rising product."""
    out = []
    for l in range(L + 1):
        x = Fraction(l % 2, 2) + Fraction(1, 4)
        steps = l // 2
        rising = Fraction(1)
        for i in range(steps):
            rising *= x + i
        out.append(rising * factorial(l % 2) / factorial(l))
    return out


def zerodim_strong_sum(g, L: int = 60):
    """Partial sum of the strong-coupling expansion at complex ``g``."""
    g = mp.mpmathify(g)
    b = zerodim_strong_coeffs(L)
    return sum(bl * g ** (-NU - mp.mpf(l) / 2) for l, bl in enumerate(b))


def zerodim_cut_imag(h, L: int = 60):
    """Imaginary part on the upper rim from the strong-coupling side.

    ``Im Z(-h) = -(1/sqrt 2) h**(-1/4) exp(-1/(4h)) sum_l b_l h**(-l/2)`` is the
    closed form; this routine instead evaluates it as a partial sum, which
    converges for every ``h > 0``.
    """
    h = mp.mpf(h)
    b = zerodim_strong_coeffs(L)
    s = sum(bl * h ** (-mp.mpf(l) / 2) for l, bl in enumerate(b))
    return -s * h ** (-NU) * mp.exp(-1 / (4 * h)) / mp.sqrt(2)


def dispersion_coefficient(l: int, j_terms: int):
    """``a_l`` from the strong-coupling coefficients through the dispersion integral.

    ``a_l = (-1)**l 4**l / (2 pi**1.5) sum_j (-2)**j Gamma(j/2+1/4) Gamma(l+j/2+1/4) / j!``.
    The sum converges only conditionally (``l = 0``) or not at all (``l >= 1``)
    as written, so terms are combined by repeated Euler averaging of the
    partial sums, which is the standard Abel-regular value.
    """
    with mp.extraprec(2 * j_terms + 20):
        terms = []
        for j in range(j_terms):
            jj = mp.mpf(j) / 2
            terms.append((-2) ** j * mp.gamma(jj + NU) * mp.gamma(l + jj + NU) / mp.factorial(j))
        s = euler_sum(terms)
        out = (-1) ** l * 4**l * s / (2 * mp.pi ** mp.mpf(1.5))
    return +out


def euler_sum(terms: list):
    """Sum an alternating-type series by the Euler transform of its partial sums.

    Uses ``sum_n 2**-(n+1) Delta^n t_0`` with the binomial difference table,
    which stays accurate for terms growing polynomially in ``n``. The
    difference table loses about ``n`` bits, so callers should add that much
    working precision.
    """
    n = len(terms)
    # alternating part a_j = (-1)^j t_j
    t = [terms[j] * (-1) ** j for j in range(n)]
    total = mp.mpf(0)
    row = t[:]
    for k in range(n):
        total += (-1) ** k * row[0] / mp.mpf(2) ** (k + 1)
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
        if not row:
            break
    return total


def dispersion_identity_check(L_terms: int, j_terms: int = 200) -> mp.mpf:
    """Maximum relative deviation of dispersion-generated ``a_l`` for ``l <= L_terms``."""
    dev = mp.mpf(0)
    for l in range(L_terms + 1):
        exact = to_mp(zerodim_weak_closed(l))
        got = dispersion_coefficient(l, j_terms)
        dev = max(dev, abs(got - exact) / abs(exact))
    return dev


def ode_residual(Z, g, dZ=None, d2Z=None):
    """Residual ``16 g**2 Z'' + 4 (1 + 8 g) Z' + 3 Z`` of a callable ``Z``."""
    g = mp.mpmathify(g)
    z0 = Z(g)
    z1 = dZ(g) if dZ else mp.diff(Z, g, 1)
    z2 = d2Z(g) if d2Z else mp.diff(Z, g, 2)
    return 16 * g**2 * z2 + 4 * (1 + 8 * g) * z1 + 3 * z0


def strong_ode_residual(b: list) -> list:
    """Coefficient residuals of ``4 zeta'' - 2 x zeta' - zeta`` for ``zeta = sum b_l x**l``."""
    out = []
    for l in range(len(b) - 2):
        out.append(4 * (l + 2) * (l + 1) * b[l + 2] - 2 * l * b[l] - b[l])
    return out


# ---------------------------------------------------------------------------
# large-N model


def largeN_kernel(x):
    return 4 * x**2 / (mp.pi * (1 + x**2) ** 2)


def largeN_profile(x):
    x = mp.mpmathify(x)
    if x == 0:
        return mp.mpf(1)
    return 2 / x * mp.atan(x / 2)


def largeN_weak_coeffs(L: int, variant: str = "original") -> WeakSeries:
    """``a_l = int_0^inf K(x) f(x)**l dx`` for ``l <= L`` by quadrature.

    ``variant="shifted"`` uses ``f + 1`` in place of ``f``. The substitution
    ``x = t/(1-t)`` maps the half line to the unit interval.
    """
    if L > 60:
        raise ValueError("order limited to 60 by quadrature cost")
    shift = 1 if variant == "shifted" else 0
    if variant not in ("original", "shifted"):
        raise ValueError(f"unknown variant {variant!r}")
    coeffs = []
    for l in range(L + 1):
        def integrand(t, l=l):
            if t == 1:
                return mp.mpf(0)
            x = t / (1 - t)
            return largeN_kernel(x) * (largeN_profile(x) + shift) ** l / (1 - t) ** 2
        val, err = mp.quad(integrand, [0, mp.mpf(1) / 4, mp.mpf(1) / 2, mp.mpf(3) / 4, 1], error=True)
        if err > mp.mpf(10) ** -12 * max(1, abs(val)):
            raise ArithmeticError(f"quadrature for a_{l} reached only {err}")
        coeffs.append(val)
    return WeakSeries(tuple(coeffs), "z", f"large-N amplitude, {variant} profile")


def largeN_inverse_moment(m: int, variant: str = "shifted", cutoff=None):
    """``int K(x) g(x)**(-m) dx`` with ``g = f`` or ``f + 1``, optionally cut at ``x <= cutoff``.

    For the original profile ``f ~ pi/x`` at large ``x`` so the integrand grows
    like ``x**(m-2)``; finite cutoffs expose the divergence.
    """
    shift = 1 if variant == "shifted" else 0
    h = lambda x: largeN_kernel(x) / (largeN_profile(x) + shift) ** m
    if cutoff is None:
        return mp.quad(h, [0, 1, 10, mp.inf])
    return mp.quad(h, [0, 1, cutoff])


def largeN_b0_polynomial(series: WeakSeries, L: int, omega) -> list:
    """Ascending coefficients in ``z`` of the order-``L`` strong-coupling approximant.

    ``b0(z) = -sum_{l=1}^{L} a_l (-z)**l C(L-l+l/omega, L-l)``; the alternating
    sign is inherited from ``Delta = -sum (-delta g/sqrt(1-delta))**l a_l``.
    """
    if L < 1 or L > series.order:
        raise ValueError(f"order {L} outside 1..{series.order}")
    omega = mp.mpmathify(omega)
    a = series.coeffs
    return [mp.mpf(0)] + [(-1) ** (l + 1) * to_mp(a[l]) * mp.binomial(L - l + l / omega, L - l)
                          for l in range(1, L + 1)]


def largeN_variational_b0(series: WeakSeries, L: int, omega, z):
    """Order-``L`` variational value ``-sum_l a_l (-z)**l C(L-l+l/omega, L-l)``."""
    z = mp.mpmathify(z)
    c = largeN_b0_polynomial(series, L, omega)
    return mp.polyval(c[::-1], z)


def _dpoly(c: list, n: int = 1) -> list:
    for _ in range(n):
        c = [k * c[k] for k in range(1, len(c))]
    return c


def _positive_real_roots(c: list) -> list:
    while c and c[-1] == 0:
        c = c[:-1]
    if len(c) < 2:
        return []
    tol = mp.mpf(2) ** (-mp.mp.prec // 3)
    out = []
    for r in all_roots(c):
        r = mp.mpc(r)
        if abs(r.imag) <= tol * max(1, abs(r)) and r.real > 0:
            out.append(r.real)
    return sorted(out)


@dataclass(frozen=True)
class LargeNPlateau:
    L: int
    omega: object
    z: object
    value: object
    kind: str                 # "extremum" or "turning-point"
    curvature: object


def largeN_plateau(series: WeakSeries, L: int, omega, previous=None) -> LargeNPlateau:
    """Plateau value of ``b0`` in ``z`` at order ``L``.

    Extrema come first, turning points only if no extremum exists. Without
    ``previous`` the flattest candidate wins; with it, the candidate whose
    value lies closest to ``previous`` (continuity in ``L``).
    """
    c = largeN_b0_polynomial(series, L, omega)
    for kind, n in (("extremum", 1), ("turning-point", 2)):
        zs = _positive_real_roots(_dpoly(c, n))
        if not zs:
            continue
        flat = _dpoly(c, n + 1)
        rows = [(z, mp.polyval(c[::-1], z), mp.polyval(flat[::-1], z)) for z in zs]
        if previous is None:
            z, v, k = min(rows, key=lambda r: abs(r[2]))
        else:
            z, v, k = min(rows, key=lambda r: abs(r[1] - previous))
        return LargeNPlateau(L, mp.mpmathify(omega), z, v, kind, k)
    raise ArithmeticError(f"no extremum or turning point on z > 0 at L={L}")


def largeN_plateau_sequence(series: WeakSeries, Ls, omega) -> list:
    """Plateaus for a range of orders, tracked by continuity.

    Tracking starts at the highest order, where the flattest extremum is
    unambiguous, and proceeds downwards. Returned in increasing ``L``.
    """
    out, prev = [], None
    for L in sorted(Ls, reverse=True):
        p = largeN_plateau(series, L, omega, previous=prev)
        out.append(p)
        prev = p.value
    return out[::-1]


@dataclass(frozen=True)
class PowerFit:
    A: float
    B: float
    kappa: float
    residual: float


def largeN_plateau_fit(Ls, values, p0=(1.0, 1e-3, 1.0)) -> PowerFit:
    """Least-squares fit ``value = A + B L**(-kappa)``."""
    x = np.asarray(Ls, dtype=float)
    y = np.asarray([float(v) for v in values])
    if len(x) < 4:
        raise ValueError("need at least four orders for a three-parameter fit")
    f = lambda L, A, B, k: A + B * L ** (-k)
    (A, B, k), _ = curve_fit(f, x, y, p0=p0, maxfev=20000)
    return PowerFit(float(A), float(B), float(k), float(np.sum((f(x, A, B, k) - y) ** 2)))


def largeN_exponential_fit(Ls, errors) -> tuple:
    """``(c0, c1)`` with ``|error| ~ exp(c0 + c1 L)`` by a linear fit of ``log|error|``."""
    x = np.asarray(Ls, dtype=float)
    y = np.asarray([float(mp.log(abs(e))) for e in errors])
    c1, c0 = np.polyfit(x, y, 1)
    return float(c0), float(c1)


def largeN_flat_omega(series: WeakSeries, L: int, omega0=0.85, z0=0.6):
    """``(omega, z)`` at which the plateau is horizontal: ``b0' = b0'' = 0``."""
    def eqs(z, w):
        c = largeN_b0_polynomial(series, L, w)
        return mp.polyval(_dpoly(c, 1)[::-1], z), mp.polyval(_dpoly(c, 2)[::-1], z)
    z, w = mp.findroot(eqs, (mp.mpf(z0), mp.mpf(omega0)))
    return w, z


def largeN_exact_limit(h):
    """Amplitude for the ``pi/x`` profile at scale ``h``.

    ``(pi**4 + 2 pi**2 h - pi**2 h**2 + 2 h**3 + 4 pi**2 h log(h/pi)) / (pi**2 + h**2)**2``
    """
    h = mp.mpmathify(h)
    if h < 0:
        raise ValueError("h must be nonnegative")
    if h == 0:
        return mp.mpf(1)
    pi = mp.pi
    num = pi**4 + 2 * pi**2 * h - pi**2 * h**2 + 2 * h**3 + 4 * pi**2 * h * mp.log(h / pi)
    return num / (pi**2 + h**2) ** 2
