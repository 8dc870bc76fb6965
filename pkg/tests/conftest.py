import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphsr.graph import Graph, build_from_edges


def random_graph(rng: np.random.Generator, n: int, p_edge: float = 0.4,
                 connected: bool = True) -> Graph:
    """Random weighted graph; with connected=True a random spanning tree is
    always included."""
    edges = []
    if connected:
        order = rng.permutation(n)
        for idx in range(1, n):
            a = int(order[idx])
            b = int(order[rng.integers(0, idx)])
            edges.append((a, b, float(rng.uniform(0.1, 2.0))))
    seen = {(min(i, j), max(i, j)) for i, j, _ in edges}
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) in seen:
                continue
            if rng.random() < p_edge:
                edges.append((i, j, float(rng.uniform(0.1, 2.0))))
    if not edges:
        edges.append((0, 1, 1.0))
    return build_from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def p2():
    return build_from_edges(2, [(0, 1, 1.0)])


@pytest.fixture
def k3():
    return build_from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
