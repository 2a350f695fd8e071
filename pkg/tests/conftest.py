import numpy as np
import pytest

from kvnlab.classical import commensurate_grid
from kvnlab.core import GaussianParams, PhaseSpaceGrid, make_gaussian_qp


@pytest.fixture(scope="session")
def default_grid():
    return PhaseSpaceGrid.default()


@pytest.fixture(scope="session")
def unit_gaussian(default_grid):
    return make_gaussian_qp(GaussianParams(1.0, 1.0, 0.5, 1.0), default_grid)


@pytest.fixture(scope="session")
def lattice_grid():
    # dp = 2 dq, so free remaps at t in {0.5, 1, 2} land on nodes
    return commensurate_grid(12.0, 6.0, 257, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the assertion happens after printing."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def report(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{label} [{'ok' if passed else 'FAIL'}]" for label, passed in checks)
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title} -- {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
