from __future__ import annotations

import numpy as np
import pytest

from bdmgraph.ctm_table import CtmTable, default_table
from bdmgraph.graph_core import Graph


@pytest.fixture(scope="session")
def table3():
    return default_table(3)


@pytest.fixture(scope="session")
def table4():
    return default_table(4)


@pytest.fixture
def toy_table():
    """Random positive table, side 3, with a reproducible seed."""
    rng = np.random.default_rng(2024)
    return CtmTable(3, rng.uniform(1.0, 30.0, 512), "toy")


def random_graph(rng, n, p=0.5) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records a pass/fail line for the summary."""

    def record(n: int, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
        print(ACCEPTANCE_LINES[n])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
