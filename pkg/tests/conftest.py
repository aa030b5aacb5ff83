import numpy as np
import pytest

from covshift.finite_space import Event, FiniteMeasure, FiniteSpace, Partition


@pytest.fixture
def four():
    """The space {1, 2, 3, 4} with the partition {{1,2},{3,4}}."""
    space = FiniteSpace((1, 2, 3, 4))
    return space, Partition.from_cells(space, [[1, 2], [3, 4]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def measure(space, mass):
    return FiniteMeasure(space, np.asarray(mass, dtype=float))


def event(space, members):
    return Event(space, [o in set(members) for o in space.outcomes])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
