from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from vptkit.models_exact import (dispersion_identity_check, largeN_b0_polynomial, largeN_exact_limit,
                                 largeN_exponential_fit, largeN_flat_omega, largeN_inverse_moment,
                                 largeN_plateau_fit, largeN_profile, largeN_variational_b0,
                                 largeN_weak_coeffs, ode_residual, strong_ode_residual, zerodim_cut_imag,
                                 zerodim_exact, zerodim_quadrature, zerodim_strong_coeffs,
                                 zerodim_strong_ratios, zerodim_strong_ratios_closed, zerodim_strong_sum,
                                 zerodim_weak_closed, zerodim_weak_coeffs)
from vptkit.series import WeakSeries


def test_weak_coefficients_two_ways_through_100():
    rec = zerodim_weak_coeffs(100).coeffs
    assert all(rec[l] == zerodim_weak_closed(l) for l in range(101))
    assert rec[2] == Fraction(105, 32)


def test_strong_ratios_two_ways():
    assert zerodim_strong_ratios(40) == zerodim_strong_ratios_closed(40)


def test_strong_coefficients_solve_their_ode():
    res = strong_ode_residual(zerodim_strong_coeffs(30))
    assert max(abs(r) for r in res) < mp.mpf(10) ** -50


def test_dispersion_identity():
    assert dispersion_identity_check(5, 200) < 1e-8


def test_exact_value_matches_quadrature():
    for g in ("0.1", "1", "10"):
        v, flag = zerodim_exact(mp.mpf(g))
        assert flag == "exact"
        assert abs(v - zerodim_quadrature(mp.mpf(g))) < mp.mpf(10) ** -12


def test_zero_coupling_limit():
    assert zerodim_exact(0) == (1, "limit")


def test_cut_value_matches_rotated_quadrature():
    h = mp.mpf("0.5")
    v, flag = zerodim_exact(-h)
    assert flag == "continued"
    q = zerodim_quadrature(h * mp.expjpi(1))
    assert abs(v - q) < mp.mpf(10) ** -12
    lower, _ = zerodim_exact(-h, upper_rim=False)
    assert lower == mp.conj(v)


def test_imaginary_part_from_strong_side():
    for h in ("0.3", "1", "2"):
        v, _ = zerodim_exact(-mp.mpf(h))
        assert abs(mp.im(v) - zerodim_cut_imag(mp.mpf(h))) < mp.mpf(10) ** -15


def test_strong_sum_matches_exact():
    assert abs(zerodim_strong_sum(mp.mpf(5)) - zerodim_exact(mp.mpf(5))[0]) < mp.mpf(10) ** -20


def test_ode_residual_of_exact_solution():
    Z = lambda g: zerodim_exact(g, check=False)[0]
    for g in ("0.1", "1", "10"):
        assert abs(ode_residual(Z, mp.mpf(g))) < 1e-8


def test_ode_residual_of_truncated_series_scales_like_g_to_L():
    s = zerodim_weak_coeffs(5)
    gs = [mp.mpf("1e-3") * k for k in (1, 2, 4)]
    r = [abs(ode_residual(s, g)) for g in gs]
    slope = np.polyfit([float(mp.log(g)) for g in gs], [float(mp.log(x)) for x in r], 1)[0]
    assert abs(slope - 5) < 0.2


# large-N model


def test_profile_and_exact_limit():
    assert largeN_profile(0) == 1
    assert abs(largeN_profile(mp.mpf(2)) - mp.pi / 4) < mp.mpf(10) ** -50
    assert largeN_exact_limit(0) == 1
    with pytest.raises(ValueError):
        largeN_exact_limit(-1)


def test_weak_coefficient_a0_is_kernel_normalization():
    s = largeN_weak_coeffs(2)
    # int_0^inf 4 x**2 / (pi (1 + x**2)**2) dx = 1
    assert abs(s.coeffs[0] - 1) < mp.mpf(10) ** -20
    with pytest.raises(ValueError):
        largeN_weak_coeffs(61)
    with pytest.raises(ValueError):
        largeN_weak_coeffs(2, "other")


def test_inverse_moment_diverges_for_original_profile():
    a = largeN_inverse_moment(3, "original", cutoff=10)
    b = largeN_inverse_moment(3, "original", cutoff=100)
    assert b > 5 * a
    assert mp.isfinite(largeN_inverse_moment(3, "shifted"))


def test_b0_polynomial_alternates():
    s = WeakSeries((mp.mpf(1), mp.mpf(1), mp.mpf(1)))
    c = largeN_b0_polynomial(s, 2, 1)
    # omega = 1: l = 1 gives +C(2, 1) z, l = 2 gives -C(2, 0) z**2
    assert c[:3] == [0, 2, -1]
    assert largeN_variational_b0(s, 2, 1, mp.mpf("0.5")) == 2 * mp.mpf("0.5") - mp.mpf("0.25")


def test_flat_omega_near_printed_value():
    w, z = largeN_flat_omega(largeN_weak_coeffs(10), 10)
    assert abs(w - mp.mpf("0.8473335")) < 1e-6
    assert abs(z - mp.mpf("0.5883974")) < 1e-6


def test_fits_recover_synthetic_data():
    Ls = list(range(10, 40))
    vals = [1 + 0.01 * L ** -0.9 for L in Ls]
    f = largeN_plateau_fit(Ls, vals)
    assert abs(f.A - 1) < 1e-8 and abs(f.kappa - 0.9) < 1e-6
    c0, c1 = largeN_exponential_fit(Ls, [np.exp(-2 - 1.1 * L) for L in Ls])
    assert abs(c0 + 2) < 1e-8 and abs(c1 + 1.1) < 1e-10
