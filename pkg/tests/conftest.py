from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from gflowkit.opengraph import OpenGraph

sys.path.insert(0, str(Path(__file__).parent))

DEMO_GRAPHS = Path(__file__).resolve().parents[1] / "demos" / "graphs"

SIX_VERTEX_EDGES = [("v1", "v2"), ("v1", "v6"), ("v2", "v6"), ("v2", "v5"), ("v6", "v4"), ("v3", "v4"), ("v3", "v5"), ("v4", "v5")]
GRID_EDGES = [(0, 1), (1, 2), (2, 4), (4, 5), (5, 3), (3, 0), (3, 2)]


def six_vertex() -> OpenGraph:
    labels = [f"v{i}" for i in range(1, 7)]
    return OpenGraph.from_edges(labels, SIX_VERTEX_EDGES, ["v1"], ["v5", "v6"])


def grid() -> OpenGraph:
    return OpenGraph.from_edges([f"v{i}" for i in range(6)], [(f"v{a}", f"v{b}") for a, b in GRID_EDGES])


def path(n: int, inputs=(0,), outputs=None) -> OpenGraph:
    outputs = (n - 1,) if outputs is None else outputs
    return OpenGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], list(inputs), list(outputs))


@st.composite
def open_graphs(draw, min_n: int = 1, max_n: int = 6, io: bool = True) -> OpenGraph:
    n = draw(st.integers(min_n, max_n))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [p for p, keep in zip(pairs, chosen) if keep]
    inputs = draw(st.integers(0, (1 << n) - 1)) if io else 0
    outputs = draw(st.integers(0, (1 << n) - 1)) if io else 0
    return OpenGraph.from_edges(n, edges).with_io(inputs, outputs)


@pytest.fixture
def six_vertex_graph() -> OpenGraph:
    return six_vertex()


@pytest.fixture
def grid_graph() -> OpenGraph:
    return grid()
