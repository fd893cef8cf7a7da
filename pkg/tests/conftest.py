import numpy as np
import pytest

from hilbertgeom.planar_convex import (
    Ellipse,
    SupportBody,
    standard_triangle,
    unit_disk,
    unit_square,
)

# (criterion number, passed, detail) rows filled in by the acceptance tests
ACCEPTANCE_ROWS = []


def trefoil_support(theta):
    return 1.0 + 0.1 * np.cos(3 * theta)


@pytest.fixture(scope="session")
def square():
    return unit_square()


@pytest.fixture(scope="session")
def tri0():
    return standard_triangle()


@pytest.fixture(scope="session")
def disk():
    return unit_disk()


@pytest.fixture(scope="session")
def ellipse21():
    return Ellipse([0.0, 0.0], 2.0, 1.0, 0.0)


@pytest.fixture(scope="session")
def trefoil():
    return SupportBody.from_function(trefoil_support)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_ROWS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}")
