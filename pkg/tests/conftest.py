"""Shared fixtures: the six-node toy hypergraph and random spec generation."""

from __future__ import annotations

import numpy as np
import pytest

from hyperclust import BlockModelSpec, InteractionHypergraph


@pytest.fixture
def toy_hypergraph() -> InteractionHypergraph:
    """Six nodes, four interactions; two balanced classes {1,2,3} and {4,5,6}."""
    return InteractionHypergraph(6, [{1, 2}, {2, 3, 6}, {4, 5, 6}, {1, 3, 4, 5}])


TOY_DENSE = np.array(
    [
        [1, 0, 0, 1],
        [1, 1, 0, 0],
        [0, 1, 0, 1],
        [0, 0, 1, 1],
        [0, 0, 1, 1],
        [0, 1, 1, 0],
    ],
    dtype=float,
)

TOY_LABELS = [1, 1, 1, 2, 2, 2]


def random_spec(rng: np.random.Generator, n_max=30, d_max=3, m_max=20) -> BlockModelSpec:
    """A random valid blockmodel spec with every interaction nonempty."""
    d = int(rng.integers(1, d_max + 1))
    sizes = rng.integers(1, max(2, n_max // d), size=d)
    while sizes.sum() > n_max:
        sizes = rng.integers(1, max(2, n_max // d), size=d)
    m = int(rng.integers(1, m_max + 1))
    z = np.repeat(np.arange(1, d + 1), sizes)
    tmat = np.empty((d, m), dtype=int)
    for r in range(d):
        tmat[r] = rng.integers(0, sizes[r] + 1, size=m)
    empty = tmat.sum(axis=0) == 0
    for p in np.flatnonzero(empty):
        r = int(rng.integers(0, d))
        tmat[r, p] = int(rng.integers(1, sizes[r] + 1))
    return BlockModelSpec(z=z, type_matrix=tmat)
