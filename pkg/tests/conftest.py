import numpy as np
import pytest

from vecmlab.synthetic import VecmDgp, simulate

ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def dgp2():
    """K=2, r=1 restricted-trend process used across modules."""
    return VecmDgp(
        alpha=[[-0.3], [0.1]], beta=[[1.0], [-1.0]], sigma=[[1.0, 0.3], [0.3, 1.0]],
        gammas=[[[0.2, 0.0], [0.1, 0.2]]], trend=[0.01], const=[0.1, 0.0],
    )


@pytest.fixture(scope="session")
def dgp3():
    return VecmDgp(
        alpha=[[-0.25], [0.1], [0.05]],
        beta=[[1.0], [-0.8], [0.5]],
        sigma=[[1.0, 0.2, 0.1], [0.2, 0.8, 0.0], [0.1, 0.0, 0.5]],
        gammas=[[[0.2, 0.05, 0.0], [0.0, 0.1, 0.0], [0.05, 0.0, 0.15]]],
        trend=[0.005], const=[0.05, 0.02, 0.0],
        names=("p", "m", "i"),
    )


@pytest.fixture(scope="session")
def sample3(dgp3):
    return simulate(dgp3, 300, seed=11)
