from __future__ import annotations

import itertools

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from loopenergy.graph import from_edge_list
from loopenergy.verify import verify_all

# first calls build permutation tables, which blows the default deadline
settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 7):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    edges = [p for p in pairs if draw(st.booleans())]
    loops = [v for v in range(n) if draw(st.booleans())]
    return from_edge_list(n, edges, loops)


@pytest.fixture(scope="session")
def sweep5():
    return verify_all(5, tol=1e-9)


@pytest.fixture(scope="session")
def sweep6():
    return verify_all(6, tol=1e-9)
