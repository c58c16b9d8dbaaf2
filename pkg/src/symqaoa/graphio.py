"""Graph data model and the plain-text edge-list format.

Format: one edge per line, ``u v`` or ``u v w``; ``#`` starts a comment.
Vertex labels are arbitrary whitespace-free tokens and are mapped to dense
0-based indices in order of first appearance. A ``#!vertices a b c`` header
pins the index order explicitly (and declares isolated vertices); other
tools see it as a comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from symqaoa.errors import InputError

Edge = tuple[int, int, float]

VERTICES_PRAGMA = "#!vertices"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with real edge weights.

    ``labels`` is ``None`` when the external labels are just ``"0".."n-1"``.
    """

    n_vertices: int
    edges: tuple[Edge, ...] = ()
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n_vertices < 0:
            raise InputError("negative vertex count")
        edges = []
        seen = set()
        for e in self.edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise InputError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise InputError(f"edge ({u}, {v}) out of range for {self.n_vertices} vertices")
            if not math.isfinite(w):
                raise InputError(f"non-finite weight on edge ({u}, {v})")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise InputError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            edges.append((u, v, w))
        object.__setattr__(self, "edges", tuple(edges))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.n_vertices or len(set(labels)) != len(labels):
                raise InputError("labels must be distinct and one per vertex")
            if labels == tuple(str(i) for i in range(self.n_vertices)):
                labels = None
            object.__setattr__(self, "labels", labels)

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence], n_vertices: int | None = None) -> "Graph":
        edges = list(edges)
        if n_vertices is None:
            n_vertices = 1 + max((max(e[0], e[1]) for e in edges), default=-1)
        return cls(n_vertices, tuple(edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def weights(self) -> list[float]:
        return [w for _, _, w in self.edges]

    def is_uniform(self) -> bool:
        return len({w for _, _, w in self.edges}) <= 1

    def adjacency(self) -> list[dict[int, float]]:
        adj: list[dict[int, float]] = [dict() for _ in range(self.n_vertices)]
        for u, v, w in self.edges:
            adj[u][v] = w
            adj[v][u] = w
        return adj

    def edge_map(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.edges}


def parse_edge_list(text: str) -> Graph:
    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float] = {}

    def vertex(tok: str) -> int:
        if tok not in index:
            index[tok] = len(index)
        return index[tok]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(VERTICES_PRAGMA):
            if index:
                raise InputError(f"line {lineno}: {VERTICES_PRAGMA} must precede all edges")
            for tok in line[len(VERTICES_PRAGMA):].split():
                if tok in index:
                    raise InputError(f"line {lineno}: vertex {tok!r} declared twice")
                vertex(tok)
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if len(toks) not in (2, 3):
            raise InputError(f"line {lineno}: expected 'u v' or 'u v w', got {raw!r}")
        if toks[0] == toks[1]:
            raise InputError(f"line {lineno}: self-loop on vertex {toks[0]!r}")
        w = 1.0
        if len(toks) == 3:
            try:
                w = float(toks[2])
            except ValueError:
                raise InputError(f"line {lineno}: non-numeric weight {toks[2]!r}") from None
            if not math.isfinite(w):
                raise InputError(f"line {lineno}: non-finite weight {toks[2]!r}")
        u, v = vertex(toks[0]), vertex(toks[1])
        key = (min(u, v), max(u, v))
        if key in edges:
            if edges[key] != w:
                raise InputError(
                    f"line {lineno}: edge ({toks[0]}, {toks[1]}) repeated with conflicting weight"
                )
            continue
        edges[key] = w

    labels = tuple(index)
    return Graph(len(labels), tuple((u, v, w) for (u, v), w in edges.items()), labels)


def serialize_edge_list(g: Graph) -> str:
    """Inverse of :func:`parse_edge_list`; weights are written with ``repr`` so they round-trip."""
    lines = [" ".join([VERTICES_PRAGMA] + [g.label(i) for i in range(g.n_vertices)])]
    for u, v, w in g.edges:
        lines.append(f"{g.label(u)} {g.label(v)} {w!r}")
    return "\n".join(lines) + "\n"


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def edge_weight_classes(g: Graph) -> list[tuple[float, list[int]]]:
    """Group edge indices by exact weight, classes ordered by weight."""
    classes: dict[float, list[int]] = {}
    for k, (_, _, w) in enumerate(g.edges):
        classes.setdefault(w, []).append(k)
    return sorted(classes.items())
