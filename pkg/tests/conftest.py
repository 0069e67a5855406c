"""Shared fixtures and graph builders for the test suite."""

import numpy as np
import pytest

from edgemend import Graph, from_dense


@pytest.fixture
def chain2() -> Graph:
    """Two-state chain with known stationary vector (4/7, 3/7)."""
    return from_dense([[0.7, 0.3],
                       [0.4, 0.6]])


@pytest.fixture
def tri3() -> Graph:
    """Three-node graph, rationally selfish, edge (0, 2) absent."""
    return from_dense([[0.6, 0.4, 0.0],
                       [0.3, 0.5, 0.2],
                       [0.2, 0.2, 0.6]])


def random_selfish_graph(rng: np.random.Generator, n: int,
                         p_edge: float = 0.3) -> Graph:
    """Random strongly connected, aperiodic, rationally selfish graph.

    Every node keeps a self-weight drawn from (0.51, 0.9); the rest of
    the row mass is split over the cycle successor plus a random subset
    of other nodes, so off-diagonal weights stay below 0.49 and the
    self-weight strictly dominates each row.
    """
    w = np.zeros((n, n))
    for i in range(n):
        own = rng.uniform(0.51, 0.9)
        picks = [j for j in range(n)
                 if j != i and j != (i + 1) % n and rng.random() < p_edge]
        picks.append((i + 1) % n)
        raw = rng.random(len(picks)) + 0.05
        raw *= (1.0 - own) / raw.sum()
        w[i, picks] = raw
        w[i, i] = own
    return from_dense(w)


def absent_pairs(g: Graph) -> list:
    """All (r, c) with r != c and no edge r -> c."""
    dense = g.to_dense()
    out = []
    for r in range(g.n):
        for c in range(g.n):
            if r != c and dense[r, c] == 0.0:
                out.append((r, c))
    return out
