import numpy as np
import pytest

from tlwavelab.experiments import job_rng
from tlwavelab.grid import GridSpec
from tlwavelab.meyer import default_system


@pytest.fixture(scope="session")
def system1():
    return default_system(1)


@pytest.fixture(scope="session")
def system2():
    return default_system(2)


@pytest.fixture
def rng(request):
    # one stream per test, stable across runs and test ordering
    return job_rng(0, request.node.nodeid)


@pytest.fixture(scope="session")
def small1():
    return GridSpec(1, 3, 8)


@pytest.fixture(scope="session")
def small2():
    return GridSpec(2, 2, 6)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
