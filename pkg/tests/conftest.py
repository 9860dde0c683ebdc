from __future__ import annotations

import sys

import pytest

from clusteredit import Instance, Mode


def path3(mode: Mode = Mode.INTEGER, w: float = 1.0) -> Instance:
    return Instance.from_edges(3, [(0, 1, w), (1, 2, w)], mode)


def k4_plus_x(mode: Mode = Mode.INTEGER) -> Instance:
    """Clique on v=0, a=1, b=2, c=3 with x=4 adjacent to a, b, c."""
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    edges += [(4, 1), (4, 2), (4, 3)]
    return Instance.from_edges(5, edges, mode)


@pytest.fixture
def p3() -> Instance:
    return path3()


@pytest.fixture
def k4x() -> Instance:
    return k4_plus_x()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results:
        terminalreporter.write_line(line)
