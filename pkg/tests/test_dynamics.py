import numpy as np
import pytest

from vptkit.dynamics import (SpectralState, flow_rhs, initial_state, integrate_path, taylor_fit_real_axis,
                             truncated_spectrum, write_trace_csv)


def test_initial_state_shape_and_symmetry():
    s = initial_state(8)
    assert s.size == 5
    assert np.allclose(s.energies.real, [0.5, 2.5, 4.5, 6.5, 8.5])
    assert s.symmetry_defect() == 0
    # <0|x**4|0> = 3/4
    assert abs(s.V[0, 0] - 0.75) < 1e-15
    with pytest.raises(ValueError):
        initial_state(7)


def test_pack_round_trip():
    s = initial_state(10)
    back = SpectralState.unpack(s.pack(), s.size, s.g)
    assert np.array_equal(back.V, s.V) and np.array_equal(back.energies, s.energies)


def test_first_order_slope():
    d = flow_rhs(initial_state(12))
    assert abs(d.energies[0] - 0.75) < 1e-14


def test_real_axis_flow_matches_diagonalization():
    # the flow of the truncated system is the eigenvalue flow of the truncated matrix
    N, g = 16, 0.05
    flow = integrate_path(N, g).energies[0]
    direct = np.sort(truncated_spectrum(N, g).real)[0]
    assert abs(flow - direct) < 1e-8


def test_negative_coupling_endpoint_is_truncated_eigenvalue():
    N, g = 16, -0.1
    e0 = integrate_path(N, g).energies[0]
    ev = truncated_spectrum(N, g)
    assert np.min(np.abs(ev - e0)) < 1e-6


def test_truncated_matrix_has_real_spectrum_on_cut():
    # H0 + g V is real symmetric for real g, so the continued eigenvalue is real
    ev = truncated_spectrum(32, -0.1)
    assert np.max(np.abs(ev.imag)) < 1e-12


def test_taylor_coefficients():
    c = taylor_fit_real_axis(16)
    assert abs(c[0] - 0.5) < 1e-9
    assert abs(c[1] - 0.75) < 1e-4
    assert abs(c[2] + 2.625) < 1e-2


def test_trace_csv(tmp_path):
    trace = []
    integrate_path(8, -0.05, trace=trace)
    assert trace and trace[-1][0].imag == pytest.approx(0, abs=1e-12)
    p = tmp_path / "trace.csv"
    write_trace_csv(p, trace)
    lines = p.read_text().splitlines()
    assert lines[0] == "re_g,im_g,re_E0,im_E0" and len(lines) == len(trace) + 1
