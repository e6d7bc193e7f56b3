from fractions import Fraction

import mpmath as mp
from hypothesis import given, settings
from hypothesis import strategies as st

from vptkit import cli
from vptkit.models_exact import zerodim_weak_coeffs
from vptkit.oscillator import OSC_GP, quartic_coeffs
from vptkit.roots import all_roots
from vptkit.series import (GrowthParams, sigma_of_omega, sigma_polynomial, to_mp, truncated_binomial,
                           truncated_binomial_sum, variational_value)

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=12)


@given(rationals, st.integers(min_value=0, max_value=25))
def test_truncated_binomial_closed_form(r, k):
    assert truncated_binomial(r, k) == truncated_binomial_sum(r, k)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=8),
       st.floats(min_value=0.2, max_value=20), st.floats(min_value=0.6, max_value=3.0),
       st.sampled_from(["oscillator", "zerodim"]))
def test_derivative_identity(L, g, Om, model):
    # dZ/dOmega = Omega**(p-1) (g/Omega**q)**L P(sigma)
    if model == "oscillator":
        s, gp = quartic_coeffs(8), OSC_GP
    else:
        s, gp = zerodim_weak_coeffs(8), GrowthParams(-1, 4)
    g, Om = mp.mpf(g), mp.mpf(Om)
    h = mp.mpf(10) ** -25
    fd = (variational_value(s, gp, L, g, Om + h) - variational_value(s, gp, L, g, Om - h)) / (2 * h)
    p, q = to_mp(gp.p), to_mp(gp.q)
    P = sigma_polynomial(s, gp, L)
    sigma = sigma_of_omega(Om, g, q)
    analytic = Om ** (p - 1) * (g / Om**q) ** L * sum(mp.mpf(c.numerator) / c.denominator * sigma**k
                                                         for k, c in enumerate(P))
    assert abs(fd - analytic) <= mp.mpf(10) ** -6 * abs(analytic) + mp.mpf(10) ** -40


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=-50, max_value=50), min_size=3, max_size=12)
       .filter(lambda c: c[-1] != 0 and c[0] != 0))
def test_conjugate_pair_symmetry(coeffs):
    roots = all_roots(coeffs)
    nonreal = [z for z in roots if z.imag != 0]
    for z in nonreal:
        assert any(w.real == z.real and w.imag == -z.imag for w in nonreal)


@settings(max_examples=5, deadline=None)
@given(st.sampled_from(["membrane", "exponents"]), st.sampled_from(["csv", "json"]))
def test_reports_are_byte_identical(tmp_path_factory, command, fmt):
    outs = []
    for run in range(2):
        d = tmp_path_factory.mktemp(f"{command}{run}")
        args = [command, "--out", str(d), "--format", fmt]
        if command == "exponents":
            args += ["--grid", "0.5,1"]
        assert cli.main(args) == 0
        outs.append((d / f"{command}.{fmt}").read_bytes())
    assert outs[0] == outs[1]
