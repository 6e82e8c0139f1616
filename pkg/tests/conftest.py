import sys

import pytest

from chenloops.models import cpn_model, two_sphere_cells, two_sphere_cells_degree9_words, sphere_model


@pytest.fixture(scope="session")
def cells_alg():
    return two_sphere_cells()


@pytest.fixture(scope="session")
def cells_words():
    return two_sphere_cells_degree9_words()


@pytest.fixture(scope="session")
def s2():
    return sphere_model(2)


@pytest.fixture(scope="session")
def s3():
    return sphere_model(3)


@pytest.fixture(scope="session")
def cp2():
    return cpn_model(2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
