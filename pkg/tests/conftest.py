from itertools import combinations

import numpy as np
import pytest

from modcollinear.formats import registry_pointset
from modcollinear.plane import collinear


def brute_psi(points, n):
    """Reference count straight from the collinearity predicate."""
    return sum(collinear(p, q, r, n) for p, q, r in combinations(list(points), 3))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def gamma1():
    return registry_pointset("gamma1")


@pytest.fixture
def gamma2():
    return registry_pointset("gamma2")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
