from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from vptkit.field_apps._data import load_tables
from vptkit.field_apps.hydrogen import (A_CONST, B_CONST, DomainError, binding_energy, h_function,
                                        hydrogen_binding, hydrogen_solve, hydrogen_strong_iteration,
                                        hydrogen_weak_coefficients, printed_weak_coefficients,
                                        stationarity_residuals, strong_asymptotic)


def test_weak_coefficients_equal_printed_table():
    assert hydrogen_weak_coefficients(3) == printed_weak_coefficients()


def test_weak_coefficients_low_orders():
    w = hydrogen_weak_coefficients(1)
    assert w.epsilon[0] == (Fraction(-4, 3), -1)
    assert w.epsilon[1] == (Fraction(9, 128), 1)
    assert w.Omega[0] == (Fraction(32, 9), -1)
    assert w.eta[1] == (Fraction(-405, 7168), 2)


def test_zero_field_start_is_stationary():
    eta, Om = mp.mpf(1), 32 / (9 * mp.pi)
    r1, r2 = stationarity_residuals(eta, Om, 0)
    assert abs(r1) < mp.mpf(10) ** -50 and abs(r2) < mp.mpf(10) ** -50
    # binding energy at B = 0 is 4/(3 pi)
    assert abs(binding_energy(eta, Om, 0) - 4 / (3 * mp.pi)) < mp.mpf(10) ** -50


def test_h_function_is_continuous_through_one():
    d = mp.mpf(10) ** -20
    assert abs(h_function(1 - d) - h_function(1)) < mp.mpf(10) ** -15
    assert abs(h_function(1 + d) - h_function(1)) < mp.mpf(10) ** -15


def test_solve_residuals_across_field_range():
    Bs = [mp.mpf(10) ** (k / 2) for k in range(-4, 13)]
    states = hydrogen_solve(Bs)
    assert max(s.residual for s in states) < 1e-10
    assert all(0 < s.eta <= 1 for s in states)


def test_solve_values():
    s = hydrogen_binding(mp.mpf(10) ** 5)
    assert abs(s.binding - mp.mpf("20.6035")) < 1e-3
    assert s.binding > 20.58 - 0.3


def test_weak_series_matches_solve_to_eighth_order():
    diffs = []
    for B in (mp.mpf("0.1"), mp.mpf("0.05")):
        diffs.append(abs(hydrogen_binding(B, "weak-series").binding - hydrogen_binding(B).binding))
    assert 150 < diffs[0] / diffs[1] < 400


def test_asymptotic_terms_at_1e5_match_table_to_four_decimals():
    printed = [mp.mpf(x) for x in load_tables("hydrogen_printed")["asymptotic_terms_B1e5"]]
    sa = strong_asymptotic(mp.mpf(10) ** 5)
    for got, want in zip(sa.leading, printed):
        assert abs(got - want) < 5e-5
    assert abs(sa.total - mp.mpf("20.58")) < 0.05
    assert sa.landau > sa.total


def test_asymptotic_needs_large_field():
    with pytest.raises(DomainError):
        strong_asymptotic(2)
    with pytest.raises(DomainError):
        hydrogen_binding(0)
    with pytest.raises(ValueError):
        hydrogen_binding(1, "other")


def test_constants():
    assert abs(A_CONST - mp.mpf("1.307")) < 1e-3
    assert abs(B_CONST - mp.mpf("-1.548")) < 1e-3


def test_iterates_converge():
    it = hydrogen_strong_iteration(mp.mpf(10) ** 5)["iterates"]
    assert abs(it[2] - it[1]) < abs(it[1] - it[0])


def test_closed_third_iterate_equals_iteration():
    r = hydrogen_strong_iteration(mp.mpf(10) ** 6)
    assert abs(r["closed_third"] - r["iterates"][2]) < mp.mpf(10) ** -40


def _slope(key_index):
    Bs = [mp.mpf(10) ** k for k in (4, 5, 6, 7)]
    x, y = [], []
    for B in Bs:
        r = hydrogen_strong_iteration(B)
        x.append(float(mp.log(mp.log(B))))
        y.append(float(mp.log(abs(r["expanded"] - r["iterates"][key_index]))))
    return np.polyfit(x, y, 1)[0]


def test_expanded_form_tracks_third_iterate_to_inverse_cube_log():
    # the stated accuracy of the expanded form relative to the third iterate
    assert abs(_slope(2) + 3) < 0.5


def test_expanded_form_tracks_second_iterate_to_inverse_cube_log():
    assert abs(_slope(1) + 3) < 0.5


def test_iteration_domain():
    with pytest.raises(ValueError):
        hydrogen_strong_iteration(10, iterations=4)
    with pytest.raises(DomainError):
        hydrogen_strong_iteration(2)
