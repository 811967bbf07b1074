import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from greedy_qaoa.optimizer import grid_search_p1
from greedy_qaoa.problem import ProblemGraph, generate_graph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def edge():
    return ProblemGraph(2, ((0, 1, 1.0),))


@pytest.fixture(scope="session")
def rrg8():
    return generate_graph("RRG3", 8, 5)


@pytest.fixture(scope="session")
def rrg8_min(rrg8):
    return grid_search_p1(rrg8, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# one summary line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def record_criterion(k, passed, detail):
    ACCEPTANCE[k] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
