import numpy as np
import pytest

from inviscid_damping import Grid, Interval, make_shear_profile

ACCEPTANCE = []


@pytest.fixture
def couette():
    return make_shear_profile("couette", [], Interval(0.0, 1.0))


@pytest.fixture
def exp3():
    """Exponential alpha = 1 on (0, 2 ln 2): |U'| spans two dyadic levels, three windows."""
    return make_shear_profile("exponential", [1.0, 0.01], Interval(0.0, 2 * np.log(2)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
