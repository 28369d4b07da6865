import numpy as np
import pytest

from cspace.resource import aklt, cluster_1d


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def aklt_mps():
    return aklt()


@pytest.fixture
def cluster_mps():
    return cluster_1d()


def random_matrix(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
