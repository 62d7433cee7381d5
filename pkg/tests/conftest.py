import time
from functools import lru_cache

import pytest

from trapcool.collocation import collocate
from trapcool.model import ProblemSpec

ACCEPTANCE_LINES = []
SOLVE_SECONDS = {}


@lru_cache(maxsize=None)
def _solve(v2, N, M):
    start = time.perf_counter()
    sol = collocate(ProblemSpec(1.0, v2, 10.0), N, M)
    SOLVE_SECONDS[(v2, N, M)] = time.perf_counter() - start
    return sol


@pytest.fixture(scope="session")
def solved():
    """Cached multistart collocation solutions for ``(v1, gamma) = (1, 10)``."""
    return _solve


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
