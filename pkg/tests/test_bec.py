from fractions import Fraction

import mpmath as mp
import pytest

from vptkit.series import generalized_binomial
from vptkit.field_apps._wk import NoStationaryPointError, optimize, replacement_poly, wk_coeffs
from vptkit.field_apps.bec import (VARIANTS, BecCoefficients, bec_c1, bec_extrapolate, beta_drop_leading,
                                   omega_prime, omega_prime_drop_leading_closed, omega_prime_large_n,
                                   omega_prime_sequence, two_loop_coefficients)


@pytest.fixture(scope="module")
def coef():
    return BecCoefficients.load()


def test_two_loop_optimum_closed_form():
    w = optimize(wk_coeffs(two_loop_coefficients(), 1, 1))
    closed = -mp.sqrt(mp.log(mp.mpf(4) / 3) / 6) / (8 * mp.pi**2)
    assert abs(w.W - closed) < mp.mpf(10) ** -40


@pytest.mark.parametrize("L,target", [(2, 3.06), (3, 1.078), (4, 1.057)])
def test_full_variant(coef, L, target):
    assert abs(bec_c1("full", L, coefficients=coef).c1 - target) < 0.005


def test_omega_prime_three(coef):
    om = omega_prime_sequence(coef.beta, (3,))[0]
    assert abs(om.value - 0.592) < 0.002 and om.source == "vanishing-extremum"


def test_drop_leading_omega_prime_two_routes(coef):
    f = coef.drop_leading
    om = omega_prime(beta_drop_leading(f), 2)
    assert abs(om.value - omega_prime_drop_leading_closed(f)) < mp.mpf(10) ** -30
    assert abs(om.value - 0.675) < 0.002


@pytest.mark.parametrize("sub,L,target", [("exact-q", 2, 0.942), ("exact-q", 3, 1.038),
                                          ("self-consistent", 3, 1.238)])
def test_drop_leading_chain(coef, sub, L, target):
    assert abs(bec_c1("drop-leading", L, coefficients=coef, sub_variant=sub).c1 - target) < 0.01


@pytest.mark.parametrize("L,target", [(2, 1.886), (3, 2.017)])
def test_large_n(coef, L, target):
    assert abs(bec_c1("large-N", L, coefficients=coef).c1 - target) < 0.005


def test_extrapolation(coef):
    c1 = [bec_c1("full", L, coefficients=coef).c1 for L in (2, 3, 4)]
    ex = bec_extrapolate([1, 2, 3], c1)
    assert abs(ex.a - 1.053) < 0.01 and ex.s == 6.0


def test_extrapolation_free_exponent_and_errors():
    Lbar = [1, 2, 3, 4]
    ex = bec_extrapolate(Lbar, [1 + 2 / x**4 for x in Lbar], s=None)
    assert abs(ex.s - 4) < 1e-3 and abs(ex.a - 1) < 1e-6
    with pytest.raises(ValueError):
        bec_extrapolate([1], [1.0])
    with pytest.raises(ValueError):
        bec_extrapolate([2, 2], [1.0, 1.1])
    with pytest.raises(ValueError):
        bec_extrapolate([1, 2], [1.0, 1.1], s=None)


def test_large_n_omega_prime_limit():
    assert abs(omega_prime_large_n(mp.mpf(10) ** 12) - 1) < 1e-10


def test_every_variant_runs_and_bad_inputs_rejected(coef):
    for v in VARIANTS:
        L = 3 if v == "fixed-q" else 2
        assert mp.isfinite(bec_c1(v, L, coefficients=coef).c1)
    # two terms at q = 2/0.81 leave W monotone on K > 0
    with pytest.raises(NoStationaryPointError):
        bec_c1("fixed-q", 2, coefficients=coef)
    with pytest.raises(ValueError):
        bec_c1("full", 5, coefficients=coef)
    with pytest.raises(ValueError):
        bec_c1("unknown", 2, coefficients=coef)
    with pytest.raises(ValueError):
        bec_c1("drop-leading", 2, coefficients=coef, sub_variant="other")


@pytest.mark.parametrize("l,k", [(0, 0), (1, 3), (2, 3), (-1, 4)])
def test_replacement_polynomial_is_truncated_binomial(l, k):
    for q in (Fraction(1), Fraction(2), Fraction(5, 2)):
        poly = replacement_poly(l, k)
        value = sum(c * q**j for j, c in enumerate(poly))
        assert value == (-1) ** k * generalized_binomial(-q * l / 2 - 1, k)


def test_no_stationary_point_error():
    with pytest.raises(NoStationaryPointError):
        optimize({0: mp.mpf(1)})


def test_second_order_replacement_of_leading_term():
    # f_{-1} K**-1 picks up 1 - 3q/4 + q**2/8 in W_2
    assert replacement_poly(-1, 2) == [1, Fraction(-3, 4), Fraction(1, 8)]


def test_third_order_replacement_of_leading_term():
    # the linear coefficient is 11/12; a printed 11/13 does not follow from the binomial
    assert replacement_poly(-1, 3) == [1, Fraction(-11, 12), Fraction(1, 4), Fraction(-1, 48)]


@pytest.mark.parametrize("L,target", [(3, 0.580), (4, 0.773)])
def test_fixed_q_chain(coef, L, target):
    assert abs(bec_c1("fixed-q", L, coefficients=coef).c1 - target) < 0.005


def test_fixed_q_two_point_extrapolation():
    # a + b/Lbar**6 through two points has a closed-form solution
    x2, x3 = Fraction(1, 64), Fraction(1, 729)
    y2, y3 = Fraction("0.580"), Fraction("0.773")
    b = (y2 - y3) / (x2 - x3)
    ex = bec_extrapolate([2, 3], [0.580, 0.773])
    assert abs(ex.a - float(y3 - b * x3)) < 1e-12
    assert abs(ex.a - 0.7916) < 1e-4


def test_qm_naive_first_order(coef):
    r = bec_c1("qm-naive", 1, coefficients=coef)
    assert r.kind == "extremum" and abs(r.c1 - 3.059) < 0.001
