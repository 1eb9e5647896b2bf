import numpy as np
import pytest

from rydvortex.params import PhysicalParams
from rydvortex.two_photon import GridSpec, solve_steady_state


@pytest.fixture(scope="session")
def lab():
    return PhysicalParams()


@pytest.fixture(scope="session")
def coarse_od74(lab):
    """Two-photon solve past the vortex onset on a small grid."""
    return solve_steady_state(lab.replace(OD=74.0), GridSpec(n=221))


@pytest.fixture(scope="session")
def free_solve(lab):
    """No interaction: the pair must stay uncorrelated."""
    return solve_steady_state(lab.replace(OD=40.0, C6_over_hbar=0.0), GridSpec(n=201))


def rel_rms(a, b):
    return float(np.sqrt(np.mean(np.abs(a - b) ** 2) / np.mean(np.abs(b) ** 2)))


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line; the lines are repeated in the terminal summary."""
    def _report(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok
    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
