"""Small structured graph families used as fixtures and benchmark instances."""

from __future__ import annotations

import itertools

import numpy as np

from symqaoa.graphio import Graph


def complete(n: int) -> Graph:
    return Graph.from_edges(itertools.combinations(range(n), 2), n)


def cycle(n: int) -> Graph:
    return Graph.from_edges(((i, (i + 1) % n) for i in range(n)), n)


def path(n: int) -> Graph:
    return Graph.from_edges(((i, i + 1) for i in range(n - 1)), n)


def star(leaves: int) -> Graph:
    return Graph.from_edges(((0, i) for i in range(1, leaves + 1)), leaves + 1)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(((i, a + j) for i in range(a) for j in range(b)), a + b)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(outer + spokes + inner, 10)


def torus_grid(rows: int, cols: int) -> Graph:
    """2D grid with periodic boundaries. With 2 rows the doubled vertical wrap collapses to one edge."""
    def idx(r, c):
        return (r % rows) * cols + (c % cols)

    edges = set()
    for r in range(rows):
        for c in range(cols):
            for a, b in ((idx(r, c), idx(r, c + 1)), (idx(r, c), idx(r + 1, c))):
                if a != b:
                    edges.add((min(a, b), max(a, b)))
    return Graph.from_edges(sorted(edges), rows * cols)


def wrapped_lattice(dim: int, side: int) -> Graph:
    """``dim``-dimensional periodic cubic lattice with ``side`` vertices per axis (side >= 3)."""
    if side < 3:
        raise ValueError("side must be at least 3 to avoid multi-edges")
    shape = (side,) * dim
    n = side**dim
    edges = []
    for flat in range(n):
        coord = np.unravel_index(flat, shape)
        for axis in range(dim):
            nb = list(coord)
            nb[axis] = (nb[axis] + 1) % side
            other = int(np.ravel_multi_index(tuple(nb), shape))
            edges.append((min(flat, other), max(flat, other)))
    return Graph.from_edges(sorted(set(edges)), n)


def random_graph(n: int, edge_prob: float, rng: np.random.Generator, weights=None) -> Graph:
    """Erdos-Renyi G(n, p); ``weights`` is an optional sequence sampled uniformly per edge."""
    edges = []
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < edge_prob:
            w = 1.0 if weights is None else float(rng.choice(weights))
            edges.append((u, v, w))
    return Graph(n, tuple(edges))
