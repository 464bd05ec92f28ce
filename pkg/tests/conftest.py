import functools

import numpy as np
import pytest

from discrete_fk.grid import Subgraph, is_connected
from discrete_fk.search import enumerate_polyominoes


@functools.lru_cache(maxsize=None)
def free_polyominoes(n):
    return tuple(enumerate_polyominoes(n, "free"))


def corpus(n_max):
    return [g for n in range(1, n_max + 1) for g in free_polyominoes(n)]


def random_subgraph(rng, n, spread=None, connected=False):
    """Random lattice set of n cells; grown from the origin when ``connected``."""
    if connected:
        cells = {(0, 0)}
        while len(cells) < n:
            x, y = list(cells)[rng.integers(len(cells))]
            dx, dy = [(1, 0), (-1, 0), (0, 1), (0, -1)][rng.integers(4)]
            cells.add((x + dx, y + dy))
        return Subgraph(cells)
    spread = spread or max(2, int(np.sqrt(n)) + 2)
    cells = set()
    while len(cells) < n:
        cells.add((int(rng.integers(-spread, spread)), int(rng.integers(-spread, spread))))
    return Subgraph(cells)


@pytest.fixture
def rng():
    return np.random.default_rng(20240614)


__all__ = ["free_polyominoes", "corpus", "random_subgraph", "is_connected"]
