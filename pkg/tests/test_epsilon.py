from fractions import Fraction

import mpmath as mp
import pytest

from vptkit.field_apps.epsilon import (EpsilonSeriesSet, OrderError, epsilon_expansion_exponents,
                                       exponent_closed_forms, large_n_pattern, log_derivative,
                                       wegner_limits)


def test_closed_forms_at_ising_point_against_hand_reduction():
    # n = 1, eps = 1 reduces by hand to omega = 9/(2 sqrt(132) - 9), nu = 207/326
    with mp.workdps(60):
        cf = exponent_closed_forms(1, 1)
        assert abs(cf["omega"] - 9 / (2 * mp.sqrt(132) - 9)) < mp.mpf(10) ** -50
        assert abs(cf["nu"] - mp.mpf(207) / 326) < mp.mpf(10) ** -50
        assert abs(cf["alpha"] - (2 - 3 * mp.mpf(207) / 326)) < mp.mpf(10) ** -50


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_small_eps_limits(n):
    eps = mp.mpf(10) ** -40
    cf = exponent_closed_forms(n, eps)
    assert abs(cf["nu"] - mp.mpf(1) / 2) < mp.mpf(10) ** -38
    assert abs(cf["omega"] / eps - 1) < mp.mpf(10) ** -38


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_closed_forms_agree_with_eps_expansion_to_second_order(n):
    # the difference must vanish like eps**3
    diffs = []
    for e in (mp.mpf("1e-3"), mp.mpf("5e-4")):
        cf = exponent_closed_forms(n, e)
        se = epsilon_expansion_exponents(n, e)
        diffs.append((abs(cf["omega"] - se["omega"]), abs(cf["nu"] - se["nu"])))
    for k in range(2):
        assert 6 < diffs[0][k] / diffs[1][k] < 10


@pytest.mark.parametrize("n,eps", [(1, Fraction(1)), (0, Fraction(1, 2)), (3, Fraction(3, 4))])
def test_variational_route_matches_closed_forms(n, eps):
    w = wegner_limits(EpsilonSeriesSet(n, eps))
    cf = exponent_closed_forms(n, eps)
    assert abs(w.omega_over_eps * eps.numerator / eps.denominator - cf["omega"]) < mp.mpf(10) ** -30
    assert abs(w.nu - cf["nu"]) < mp.mpf(10) ** -30


def test_series_set_is_exact_for_rational_input():
    s = EpsilonSeriesSet(1, Fraction(1))
    assert s.coupling[:3] == (0, 1, -3)
    assert all(isinstance(c, (int, Fraction)) for c in s.mass)
    with pytest.raises(ZeroDivisionError):
        EpsilonSeriesSet(1, 0)


def test_log_derivative():
    # f = x (1 + x): x f'/f = 1 + x/(1 + x) = 1 + x - x**2 + ...
    assert log_derivative([0, 1, 1, 0], 2) == [1, 1, -1]


def test_order_limits():
    with pytest.raises(OrderError):
        epsilon_expansion_exponents(1, 1, order=3)
    with pytest.raises(OrderError):
        wegner_limits(EpsilonSeriesSet(1, 1), order=3)
    assert large_n_pattern() == {"nu": [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]}
