import numpy as np
import pytest

from xmesh.mesh import generate_structured_mesh
from xmesh.physics import ICE_WATER


@pytest.fixture
def unit2():
    """2 x 2 structured mesh of the unit square."""
    return generate_structured_mesh(2, 2, (0.0, 0.0, 1.0, 1.0))


@pytest.fixture
def small_mesh():
    return generate_structured_mesh(4, 3, (0.0, 0.0, 0.04, 0.03))


@pytest.fixture
def props():
    return ICE_WATER


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the one-line outcome of an acceptance criterion.

    ``criterion(n, ok, detail)`` stores the line for the terminal summary,
    prints it and returns ``ok`` so the test can assert on it.
    """
    def record(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[n] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
