from fractions import Fraction

import mpmath as mp
import pytest

from vptkit.models_exact import zerodim_weak_coeffs
from vptkit.oscillator import OSC_GP, quartic_coeffs
from vptkit.series import (GrowthParams, WeakSeries, generalized_binomial, reexpand, second_derivative,
                           sigma_of_omega, sigma_polynomial, sigma_to_omega, strong_b0_closed,
                           strong_coupling_coefficients, to_fraction, truncated_binomial,
                           truncated_binomial_sum, turning_polynomial, variational_value)
from vptkit.tps import TruncatedSeries


def test_generalized_binomial_exact():
    assert generalized_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert generalized_binomial(5, 2) == 10
    assert generalized_binomial(Fraction(-1), 3) == -1
    with pytest.raises(ValueError):
        generalized_binomial(1, -1)


def test_truncated_binomial_examples():
    # (1 - 1)**r truncated: 1 - r + r(r-1)/2 for k = 2
    r = Fraction(1, 3)
    assert truncated_binomial(r, 2) == 1 - r + r * (r - 1) / 2
    assert truncated_binomial(r, 0) == 1
    # integer r reproduces the exact zero once k >= r
    assert truncated_binomial(3, 5) == 0


def test_growth_params():
    gp = GrowthParams(1, 3)
    assert gp.p == 1 and gp.q == 3 and gp.omega == Fraction(2, 3)
    with pytest.raises(ValueError):
        GrowthParams(1, 0)


def test_weak_series_json_round_trip():
    s = quartic_coeffs(6)
    back, gp = WeakSeries.from_json(s.to_json(OSC_GP))
    assert back.coeffs == s.coeffs and gp == OSC_GP
    with pytest.raises(ValueError):
        WeakSeries.from_json('{"coeffs": ["0.5"]}')
    with pytest.raises(ValueError):
        s.truncate(7)


def test_to_fraction_parses_strings():
    assert to_fraction("-3/4") == Fraction(-3, 4)
    assert to_fraction(2) == 2


def test_unit_frequency_reproduces_truncated_series():
    # Omega = 1 means no substitution: Z_var is the plain partial sum
    s = quartic_coeffs(8)
    g = mp.mpf("0.01")
    for L in (1, 4, 8):
        direct = sum(mp.mpf(c.numerator) / c.denominator * g**l for l, c in enumerate(s.coeffs[: L + 1]))
        assert abs(variational_value(s, OSC_GP, L, g, 1) - direct) < mp.mpf(10) ** -50


def test_reexpansion_first_order_is_plain_series():
    s = quartic_coeffs(3)
    eps = reexpand(s, OSC_GP, 3)
    assert len(eps) == 4
    # epsilon_0 carries a_0 and powers of sigma from expanding Omega**p
    assert eps[0][0] == s.coeffs[0]


def test_sigma_polynomial_degree_and_order_zero():
    s = quartic_coeffs(5)
    assert len(sigma_polynomial(s, OSC_GP, 5)) == 6
    assert sigma_polynomial(s, OSC_GP, 0) == [0]
    with pytest.raises(ValueError):
        sigma_polynomial(s, OSC_GP, 6)


def test_first_order_root_is_six():
    s = quartic_coeffs(1)
    P = sigma_polynomial(s, OSC_GP, 1)
    assert P[0] + 6 * P[1] == 0


def test_second_derivative_matches_finite_difference():
    s = quartic_coeffs(6)
    g, Om, h = mp.mpf(2), mp.mpf("1.7"), mp.mpf(10) ** -20
    f = lambda w: variational_value(s, OSC_GP, 6, g, w)
    fd = (f(Om + h) - 2 * f(Om) + f(Om - h)) / h**2
    assert abs(second_derivative(s, OSC_GP, 6, g, Om) - fd) < mp.mpf(10) ** -15 * abs(fd)


def test_turning_polynomial_shape():
    s = quartic_coeffs(4)
    assert len(turning_polynomial(s, OSC_GP, 4)) == 5


def test_sigma_to_omega_inverts_sigma():
    g, sigma = mp.mpf(3), mp.mpf("7.5")
    branches, principal = sigma_to_omega(sigma, g, 3)
    for Om in branches:
        assert abs(sigma_of_omega(Om, g, 3) - sigma) < mp.mpf(10) ** -40
    assert principal in range(len(branches))


def test_two_routes_to_b0_agree():
    s = quartic_coeffs(10)
    sigma = mp.mpf("9.3")
    a = strong_coupling_coefficients(s, OSC_GP, 10, sigma, n_terms=2).b[0]
    b = strong_b0_closed(s, OSC_GP, 10, sigma)
    assert abs(a - b) < mp.mpf(10) ** -50


def test_strong_coefficients_zerodim_first_order():
    # L = 1, p = -1, q = 4: one term from a_0 and a_1
    s = zerodim_weak_coeffs(1)
    gp = GrowthParams(-1, 4)
    r = strong_coupling_coefficients(s, gp, 1, mp.mpf(3), n_terms=1)
    assert len(r.b) == 2 and mp.isfinite(r.b[0])
    with pytest.raises(ZeroDivisionError):
        strong_coupling_coefficients(s, gp, 1, 0)


def test_truncated_series_algebra():
    x = TruncatedSeries.variable(6)
    one_plus = 1 + x
    inv = one_plus.power(-1)
    prod = one_plus * inv
    assert [c for c in prod.coeffs] == [1, 0, 0, 0, 0, 0, 0]
    half = TruncatedSeries([Fraction(1), Fraction(1)] + [Fraction(0)] * 5).power(Fraction(1, 2))
    sq = half * half
    assert list(sq.coeffs) == [1, 1, 0, 0, 0, 0, 0]
