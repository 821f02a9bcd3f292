import numpy as np
import pytest

from semilinear_recon import build_grid
from semilinear_recon import nonlinearity as nl


@pytest.fixture(scope="session")
def grid32():
    return build_grid(32)


@pytest.fixture(scope="session")
def grid64():
    return build_grid(64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture(scope="session")
def cubic():
    return nl.get("neg_u3")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
