from __future__ import annotations

import itertools
from functools import lru_cache

import pytest

from gridlab import catalog
from gridlab.grid import GridDiagram, apply_column_swap, detect_cross_commutation, trace_components

ACCEPTANCE: dict = {}


def record(criterion: int, passed: bool, text: str) -> None:
    ACCEPTANCE[criterion] = (passed, text)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if passed else 'FAIL'} - {text}")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("GRIDLAB_CACHE", str(tmp_path / "cache"))


@lru_cache(maxsize=None)
def knot_grids(n: int):
    out = []
    for xs in itertools.permutations(range(n)):
        for os_ in itertools.permutations(range(n)):
            if any(a == b for a, b in zip(xs, os_)):
                continue
            g = GridDiagram(n, xs, os_)
            if trace_components(g) == 1:
                out.append(g)
    return out


@lru_cache(maxsize=None)
def crossing_pairs(n: int = 4):
    """Ordered pairs of knot grids related by a cross-commutation."""
    out = []
    for g in knot_grids(n):
        for c in range(n):
            h = apply_column_swap(g, c)
            if trace_components(h) == 1 and detect_cross_commutation(g, h) is not None:
                out.append((g, h))
    return out


@pytest.fixture(scope="session")
def grids():
    return {name: catalog.load(name) for name in catalog.names()}


@pytest.fixture(scope="session")
def pairs(grids):
    return [(grids[a], grids[b]) for a, b in catalog.PAIRS]
