import mpmath as mp
import pytest

from vptkit.models_exact import zerodim_exact, zerodim_weak_coeffs
from vptkit.roots import NoRealRootError
from vptkit.zerodim import (complex_candidates, convergence_study, cut_study, log_error_slope,
                            normalized_log_imag, select_root, upper_rim_value, zerodim_vpt)


def test_empty_order_list():
    assert convergence_study(10, []) == []


def test_errors_shrink_along_odd_orders():
    rows = convergence_study(10, [5, 9, 13, 17])
    errs = [r.error for r in rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    slope, _ = log_error_slope(rows)
    assert -1.2 < slope < -0.4


def test_odd_orders_use_extremum_even_orders_turning_point():
    s = zerodim_weak_coeffs(6)
    assert select_root(5, "real", series=s).rule_applied == "real-extremum"
    assert select_root(6, "real", series=s).rule_applied == "real-turning-point"


def test_unknown_rule():
    with pytest.raises(ValueError):
        select_root(4, "nearest")


def test_complex_candidates_upper_half_plane():
    cands = complex_candidates(zerodim_weak_coeffs(8), 8)
    assert cands and all(c.sigma.imag > 0 for c in cands)


def test_upper_rim_sign_convention():
    s = zerodim_weak_coeffs(8)
    c = complex_candidates(s, 8)[0]
    v = upper_rim_value(s, 8, mp.mpf("-0.3"), c.sigma)
    assert mp.im(v) <= 0
    assert mp.im(zerodim_exact(mp.mpf("-0.3"))[0]) < 0


def test_normalized_imaginary_part_is_logarithmic_near_origin():
    vals = [normalized_log_imag(-mp.mpf(h), zerodim_exact(-mp.mpf(h))[0]) for h in ("0.002", "0.001")]
    assert abs((vals[0] - vals[1]) - mp.log(2) / 4) < 0.01


def test_vpt_value_at_positive_coupling():
    s = zerodim_weak_coeffs(9)
    rep = select_root(9, "real", series=s)
    v = zerodim_vpt(9, 10, rep.chosen.sigma, s)
    assert abs(v - zerodim_exact(10)[0]) < 1e-3


def test_cut_study_small_grid():
    grid = [mp.mpf("-1"), mp.mpf("-0.1")]
    rep, rows = cut_study(8, grid, "cluster")
    assert rep.rule_applied and len(rows) == 2
    assert all(r.rel_re < 0.5 for r in rows)


def test_real_rule_fails_without_real_roots():
    s = zerodim_weak_coeffs(1)
    # first order has a single real root, so this succeeds; cluster needs complex ones
    assert select_root(1, "real", series=s)
    with pytest.raises(NoRealRootError):
        select_root(1, "cluster", series=s)
