import os

import mpmath as mp
import pytest

FULL = os.environ.get("VPTKIT_FULL", "") not in ("", "0")

_CRITERIA = []


def record(number: int, label: str, passed: bool, detail: str) -> None:
    """Keep one line per acceptance criterion for the terminal summary."""
    _CRITERIA.append((number, label, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, passed, detail in sorted(_CRITERIA, key=lambda r: r[:2]):
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {label}: {detail}")


@pytest.fixture(autouse=True)
def _precision():
    old = mp.mp.prec
    mp.mp.prec = 200
    yield
    mp.mp.prec = old


def _at_200_bits(fn):
    with mp.workprec(200):
        return fn()


@pytest.fixture(scope="session")
def quartic300():
    from vptkit.oscillator import quartic_coeffs
    return _at_200_bits(lambda: quartic_coeffs(300))


@pytest.fixture(scope="session")
def largen_original():
    from vptkit.models_exact import largeN_weak_coeffs
    return _at_200_bits(lambda: largeN_weak_coeffs(45, "original"))


@pytest.fixture(scope="session")
def largen_shifted():
    from vptkit.models_exact import largeN_weak_coeffs
    return _at_200_bits(lambda: largeN_weak_coeffs(24, "shifted"))


@pytest.fixture(scope="session")
def plateau_0843(largen_original):
    from vptkit.models_exact import largeN_plateau_sequence
    return _at_200_bits(lambda: largeN_plateau_sequence(largen_original, range(14, 46), mp.mpf("0.843")))


@pytest.fixture(scope="session")
def plateau_shifted(largen_shifted):
    from vptkit.models_exact import largeN_plateau_sequence
    return _at_200_bits(lambda: largeN_plateau_sequence(largen_shifted, range(4, 25), 1))
