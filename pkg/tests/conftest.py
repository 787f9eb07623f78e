import numpy as np
import pytest

from infogeom.densities import make_complex_gaussian, make_gaussian, make_warped_gaussian

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20040322)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(label, passed, detail=""):
        _ACCEPTANCE.append((label, bool(passed), detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")


REAL_FAMILIES = {
    "gaussian1": lambda: make_gaussian(1, 1.0),
    "gaussian3": lambda: make_gaussian(3, 1.0),
    "gaussian3_a2": lambda: make_gaussian(3, 2.0),
    "warped2": lambda: make_warped_gaussian(2, 0.7),
}
ALL_FAMILIES = dict(REAL_FAMILIES, complex=lambda: make_complex_gaussian(1.0),
                    complex_a05=lambda: make_complex_gaussian(0.5))
