import numpy as np
import pytest

from rotbeta import LatticeDomain, RotBetaMap, rotation

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def square():
    return LatticeDomain.unit_cube(2)


@pytest.fixture
def interval():
    return LatticeDomain.unit_cube(1)


@pytest.fixture
def doubling(interval):
    return RotBetaMap(2.0, np.eye(1), interval)


@pytest.fixture
def slab_map():
    dom = LatticeDomain.from_vectors([[1.0, 0.0], [0.0, 3.0]])
    return RotBetaMap(2.5, rotation(np.pi / 2), dom)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
