"""Graph automorphisms and the orbits they induce on Hamiltonian terms.

Generators come from an individualization-refinement search: refine the
colour partition to an equitable one, individualize a vertex of the first
smallest non-singleton cell, repeat. The leftmost path of that tree fixes a
reference leaf; every other node on the path is probed for automorphisms
mapping the path's choice onto each still-unexplained candidate. Candidates
already reachable through known automorphisms are skipped, as are candidates
in the orbit of a known failure.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from symqaoa.errors import InputError, OrbitError, SolverTimeoutError
from symqaoa.graphio import Graph, edge_weight_classes
from symqaoa.hamiltonian import Hamiltonian, Support, hamiltonian_graph

Permutation = tuple[int, ...]

DEFAULT_SOLVER_TIMEOUT = 600.0
BRUTE_FORCE_MAX_N = 10


@dataclass(frozen=True)
class ColoredGraph:
    graph: Graph
    colors: tuple[int, ...] = None

    def __post_init__(self):
        colors = self.colors
        if colors is None:
            colors = (0,) * self.graph.n_vertices
        colors = tuple(int(c) for c in colors)
        if len(colors) != self.graph.n_vertices:
            raise InputError("one colour per vertex required")
        if colors and sorted(set(colors)) != list(range(max(colors) + 1)):
            raise InputError("colours must be dense ids 0..k-1")
        object.__setattr__(self, "colors", colors)

    @property
    def n(self) -> int:
        return self.graph.n_vertices


@dataclass(frozen=True)
class GeneratorSet:
    n: int
    generators: tuple[Permutation, ...] = ()

    def __post_init__(self):
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for g in gens:
            if len(g) != self.n or sorted(g) != list(range(self.n)):
                raise InputError(f"generator {g} is not a permutation of {self.n} points")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def trivial(cls, n: int) -> "GeneratorSet":
        return cls(n, ())

    def to_dict(self) -> dict:
        return {"n": self.n, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSet":
        return cls(int(d["n"]), tuple(tuple(g) for g in d["generators"]))

    def restrict(self, back_map: Sequence[int | None]) -> "GeneratorSet":
        """Project generators of a gadget graph onto the original vertices named in ``back_map``."""
        fwd = {orig: k for k, orig in enumerate(back_map) if orig is not None}
        n = len(fwd)
        out = []
        for g in self.generators:
            img = []
            for orig in range(n):
                target = back_map[g[fwd[orig]]]
                if target is None:
                    raise OrbitError("gadget automorphism moves an original vertex onto a subdivision vertex")
                img.append(target)
            img = tuple(img)
            if img != tuple(range(n)) and img not in out:
                out.append(img)
        return GeneratorSet(n, tuple(out))


class UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def groups(self) -> dict:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def is_automorphism(cg: ColoredGraph, perm: Sequence[int]) -> bool:
    """Colour-preserving and edge/weight-preserving bijection check."""
    n = cg.n
    if len(perm) != n or sorted(perm) != list(range(n)):
        return False
    if any(cg.colors[perm[v]] != cg.colors[v] for v in range(n)):
        return False
    emap = cg.graph.edge_map()
    for (u, v), w in emap.items():
        a, b = perm[u], perm[v]
        if emap.get((min(a, b), max(a, b))) != w:
            return False
    return True


def color_partition(cg: ColoredGraph) -> list[list[int]]:
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(cg.colors):
        cells.setdefault(c, []).append(v)
    return [cells[c] for c in sorted(cells)]


class _Refiner:
    def __init__(self, cg: ColoredGraph):
        self.n = cg.n
        # neighbour lists with weights mapped to small integer classes for cheap hashing
        classes = {w: k for k, (w, _) in enumerate(edge_weight_classes(cg.graph))}
        self.nbrs: list[list[tuple[int, int]]] = [[] for _ in range(cg.n)]
        for u, v, w in cg.graph.edges:
            self.nbrs[u].append((v, classes[w]))
            self.nbrs[v].append((u, classes[w]))

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        """Coarsest equitable refinement; fragments of a cell are ordered by their signature."""
        cells = [list(c) for c in cells]
        while True:
            cell_of = [0] * self.n
            for k, c in enumerate(cells):
                for v in c:
                    cell_of[v] = k
            new_cells = []
            for c in cells:
                if len(c) == 1:
                    new_cells.append(c)
                    continue
                groups: dict[tuple, list[int]] = {}
                for v in c:
                    sig = tuple(sorted((cell_of[u], wc) for u, wc in self.nbrs[v]))
                    groups.setdefault(sig, []).append(v)
                if len(groups) == 1:
                    new_cells.append(c)
                else:
                    new_cells.extend(groups[s] for s in sorted(groups))
            if len(new_cells) == len(cells):
                return [sorted(c) for c in new_cells]
            cells = new_cells


def refine(cg: ColoredGraph, initial: Sequence[Sequence[int]] | None = None) -> list[list[int]]:
    """Coarsest equitable refinement of ``initial`` (defaults to the colour classes)."""
    if initial is None:
        initial = color_partition(cg)
    return _Refiner(cg).refine([list(c) for c in initial])


def _individualize(cells: list[list[int]], k: int, v: int) -> list[list[int]]:
    rest = [u for u in cells[k] if u != v]
    return cells[:k] + [[v], rest] + cells[k + 1:]


def _target_cell(cells: list[list[int]]) -> int | None:
    best = None
    for k, c in enumerate(cells):
        if len(c) > 1 and (best is None or len(c) < len(cells[best])):
            best = k
    return best


def _shape(cells) -> tuple[int, ...]:
    return tuple(len(c) for c in cells)


class _Search:
    def __init__(self, cg: ColoredGraph, timeout: float):
        self.cg = cg
        self.refiner = _Refiner(cg)
        self.deadline = time.monotonic() + timeout
        self.timeout = timeout
        self.generators: list[Permutation] = []

    def _tick(self):
        if time.monotonic() > self.deadline:
            raise SolverTimeoutError(
                f"automorphism search exceeded {self.timeout:g} s",
                partial=GeneratorSet(self.cg.n, tuple(self.generators)),
            )

    def run(self) -> GeneratorSet:
        n = self.cg.n
        if n == 0:
            return GeneratorSet(0)
        node = self.refiner.refine(color_partition(self.cg))
        self.path = [node]
        self.choices: list[int] = []
        self.targets: list[int] = []
        while (k := _target_cell(node)) is not None:
            v = node[k][0]
            self.targets.append(k)
            self.choices.append(v)
            node = self.refiner.refine(_individualize(node, k, v))
            self.path.append(node)
        self.leaf = [c[0] for c in node]
        self.shapes = [_shape(c) for c in self.path]

        for depth in reversed(range(len(self.choices))):
            self._explore_level(depth)
        return GeneratorSet(n, tuple(self.generators))

    def _explore_level(self, depth: int):
        cells = self.path[depth]
        k = self.targets[depth]
        v = self.choices[depth]
        # every generator found so far fixes choices[:depth] pointwise
        uf = UnionFind(range(self.cg.n))
        for g in self.generators:
            for x in range(self.cg.n):
                uf.union(x, g[x])
        failed: set = set()
        for w in cells[k]:
            self._tick()
            if uf.find(w) == uf.find(v) or uf.find(w) in failed:
                continue
            gamma = self._probe(self.refiner.refine(_individualize(cells, k, w)), depth + 1, v, w, depth)
            if gamma is None:
                failed.add(uf.find(w))
                continue
            self.generators.append(gamma)
            for x in range(self.cg.n):
                uf.union(x, gamma[x])
            failed = {uf.find(r) for r in failed}

    def _probe(self, cells, depth, v, w, level) -> Permutation | None:
        """DFS below a candidate node for a leaf that yields an automorphism fixing the prefix and sending v to w."""
        if _shape(cells) != self.shapes[depth]:
            return None
        self._tick()
        if depth == len(self.path) - 1:
            gamma = [0] * self.cg.n
            for a, cell in zip(self.leaf, cells):
                gamma[a] = cell[0]
            if gamma[v] != w or any(gamma[c] != c for c in self.choices[:level]):
                return None
            return tuple(gamma) if is_automorphism(self.cg, gamma) else None
        k = self.targets[depth]
        for u in cells[k]:
            found = self._probe(self.refiner.refine(_individualize(cells, k, u)), depth + 1, v, w, level)
            if found is not None:
                return found
        return None


def automorphism_generators(cg: ColoredGraph, timeout: float = DEFAULT_SOLVER_TIMEOUT) -> GeneratorSet:
    """Generators of the full colour-preserving automorphism group.

    Raises :class:`SolverTimeoutError` (carrying the generators found so far)
    once ``timeout`` seconds of wall-clock time are spent.
    """
    gens = _Search(cg, timeout).run()
    for g in gens.generators:
        if not is_automorphism(cg, g):
            raise AssertionError(f"search produced a non-automorphism {g}")
    return gens


def brute_force_automorphisms(cg: ColoredGraph) -> GeneratorSet:
    """Every automorphism, listed explicitly (identity included). Exhaustive backtracking for n <= 10."""
    n = cg.n
    if n > BRUTE_FORCE_MAX_N:
        raise InputError(f"brute force limited to {BRUTE_FORCE_MAX_N} vertices, got {n}")
    adj = cg.graph.adjacency()
    colors = cg.colors
    found: list[Permutation] = []
    img = [-1] * n
    used = [False] * n

    def extend(v):
        if v == n:
            found.append(tuple(img))
            return
        for t in range(n):
            if used[t] or colors[t] != colors[v]:
                continue
            ok = True
            for u in range(v):
                if adj[v].get(u) != adj[t].get(img[u]):
                    ok = False
                    break
            if ok:
                img[v] = t
                used[t] = True
                extend(v + 1)
                used[t] = False
        img[v] = -1

    extend(0)
    return GeneratorSet(n, tuple(found))


def weighted_gadget(g: Graph) -> tuple[ColoredGraph, list[int | None]]:
    """Edge weights become vertex colours on subdivision vertices.

    Returns the coloured gadget and ``back_map``: gadget index -> original
    vertex, or ``None`` for subdivision vertices.
    """
    n = g.n_vertices
    if g.is_uniform():
        return ColoredGraph(g), list(range(n))
    color_of_weight = {w: 1 + k for k, (w, _) in enumerate(edge_weight_classes(g))}
    edges = []
    colors = [0] * n
    for k, (u, v, w) in enumerate(g.edges):
        s = n + k
        edges += [(u, s), (v, s)]
        colors.append(color_of_weight[w])
    gadget = Graph(n + g.n_edges, tuple(edges))
    return ColoredGraph(gadget, tuple(colors)), list(range(n)) + [None] * g.n_edges


def graph_generators(g: Graph, timeout: float = DEFAULT_SOLVER_TIMEOUT) -> GeneratorSet:
    """Weight-preserving automorphism generators of ``g`` via the gadget."""
    cg, back = weighted_gadget(g)
    gens = automorphism_generators(cg, timeout)
    return gens.restrict(back)


def hamiltonian_generators(
    h: Hamiltonian, timeout: float = DEFAULT_SOLVER_TIMEOUT, use_partial: bool = False
) -> tuple[GeneratorSet, bool]:
    """Symmetry generators of a quadratic Hamiltonian's coupling graph.

    Returns ``(generators, timed_out)``. On timeout the trivial group is
    used unless ``use_partial`` is set, in which case whatever generators
    were found are kept (any subgroup is sound).
    """
    g = hamiltonian_graph(h)
    cg, back = weighted_gadget(g)
    try:
        return automorphism_generators(cg, timeout).restrict(back), False
    except SolverTimeoutError as exc:
        if use_partial and exc.partial is not None:
            return exc.partial.restrict(back), True
        return GeneratorSet.trivial(h.n_qubits), True


@dataclass(frozen=True)
class OrbitClass:
    rep: Support
    members: tuple[Support, ...]
    coeff: float

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OrbitPartition:
    classes: tuple[OrbitClass, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def n_terms(self) -> int:
        return sum(c.multiplicity for c in self.classes)

    def blocks(self) -> set[frozenset]:
        return {frozenset(c.members) for c in self.classes}

    def to_dict(self, labels: Graph | None = None) -> dict:
        out = []
        for c in self.classes:
            entry = {"rep": list(c.rep), "size": c.multiplicity, "coeff": c.coeff}
            if labels is not None and labels.labels is not None:
                entry["rep_labels"] = [labels.label(j) for j in c.rep]
            out.append(entry)
        return {"n_orbits": len(self.classes), "classes": out}

    def to_json(self, labels: Graph | None = None) -> str:
        return json.dumps(self.to_dict(labels), indent=2)


def _act(g: Permutation, support: Support) -> Support:
    return tuple(sorted(g[j] for j in support))


def term_orbits(gens: GeneratorSet, h: Hamiltonian) -> OrbitPartition:
    """Orbits of term supports under the group generated by ``gens``."""
    if gens.n != h.n_qubits:
        raise InputError(f"generators act on {gens.n} points, Hamiltonian has {h.n_qubits} qubits")
    supports = [t.support for t in h.terms]
    index = h.index
    uf = UnionFind(supports)
    # one sweep suffices: unioning s with g(s) for every generator and every s closes the orbits
    for g in gens.generators:
        for s in supports:
            img = _act(g, s)
            if img not in index:
                raise OrbitError(f"generator maps term {list(s)} onto {list(img)}, which is not a term")
            if h.terms[index[img]].coeff != h.terms[index[s]].coeff:
                raise OrbitError(
                    f"generator connects terms {list(s)} and {list(img)} with different coefficients"
                )
            uf.union(s, img)
    classes = []
    for members in uf.groups().values():
        members = sorted(members)
        classes.append(OrbitClass(members[0], tuple(members), h.terms[index[members[0]]].coeff))
    classes.sort(key=lambda c: c.rep)
    return OrbitPartition(tuple(classes))


def trivial_orbits(h: Hamiltonian) -> OrbitPartition:
    return term_orbits(GeneratorSet.trivial(h.n_qubits), h)


def vertex_orbits(gens: GeneratorSet) -> list[list[int]]:
    uf = UnionFind(range(gens.n))
    for g in gens.generators:
        for x in range(gens.n):
            uf.union(x, g[x])
    return sorted(sorted(c) for c in uf.groups().values())


def group_order(gens: GeneratorSet, limit: int = 10**6) -> int:
    """Order of the generated group by closure; only for small groups (tests)."""
    identity = tuple(range(gens.n))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens.generators:
                q = tuple(g[p[i]] for i in range(gens.n))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > limit:
                        raise InputError("group too large to enumerate")
        frontier = nxt
    return len(seen)


def shuffled(gens: GeneratorSet, seed: int) -> GeneratorSet:
    gs = list(gens.generators)
    random.Random(seed).shuffle(gs)
    return GeneratorSet(gens.n, tuple(gs))


__all__ = [
    "ColoredGraph",
    "GeneratorSet",
    "OrbitClass",
    "OrbitPartition",
    "Permutation",
    "UnionFind",
    "automorphism_generators",
    "brute_force_automorphisms",
    "color_partition",
    "graph_generators",
    "group_order",
    "hamiltonian_generators",
    "is_automorphism",
    "refine",
    "term_orbits",
    "trivial_orbits",
    "vertex_orbits",
    "weighted_gadget",
]
