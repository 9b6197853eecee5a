import numpy as np
import pytest

from qtsync.graph import Graph


def random_graph(rng: np.random.Generator, n: int, p: float = 0.5) -> Graph:
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Graph(n, pairs)


def random_pairs(seed: int = 12345, count: int = 50):
    """Seeded (graph, state) pairs with n in [2, 12]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 13))
        g = random_graph(rng, n, float(rng.uniform(0.2, 0.9)))
        out.append((g, rng.uniform(-np.pi, np.pi, n)))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
