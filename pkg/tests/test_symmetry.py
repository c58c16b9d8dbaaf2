import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symqaoa import families as F
from symqaoa.errors import OrbitError, SolverTimeoutError
from symqaoa.graphio import Graph
from symqaoa.hamiltonian import Hamiltonian, build_ising, build_maxcut
from symqaoa.symmetry import (
    ColoredGraph,
    GeneratorSet,
    UnionFind,
    automorphism_generators,
    brute_force_automorphisms,
    graph_generators,
    group_order,
    hamiltonian_generators,
    is_automorphism,
    refine,
    shuffled,
    term_orbits,
    trivial_orbits,
    vertex_orbits,
    weighted_gadget,
)


@pytest.mark.parametrize("g,order", [
    (F.path(3), 2),
    (F.cycle(4), 8),
    (F.cycle(7), 14),
    (F.complete(4), 24),
    (F.star(4), 24),
    (F.petersen(), 120),
    (F.complete_bipartite(3, 3), 72),
    (F.wrapped_lattice(2, 4), 384),
    (F.wrapped_lattice(3, 3), 1296),
])
def test_group_orders(g, order):
    assert group_order(graph_generators(g)) == order


def test_brute_force_petersen_order():
    assert len(brute_force_automorphisms(ColoredGraph(F.petersen())).generators) == 120


def test_generators_are_automorphisms():
    for g in [F.petersen(), F.torus_grid(3, 5), F.complete(9)]:
        cg = ColoredGraph(g)
        for perm in automorphism_generators(cg).generators:
            assert is_automorphism(cg, perm)


def test_colours_restrict_group():
    cg = ColoredGraph(F.cycle(4), (1, 0, 0, 0))
    gens = automorphism_generators(cg)
    assert group_order(gens) == 2
    assert vertex_orbits(gens) == [[0], [1, 3], [2]]


def test_asymmetric_graph_has_no_generators():
    # spider with legs of length 1, 2 and 3: the smallest asymmetric tree
    g = Graph.from_edges([(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
    assert automorphism_generators(ColoredGraph(g)).generators == ()
    assert len(brute_force_automorphisms(ColoredGraph(g)).generators) == 1


def test_refinement_is_equitable():
    g = F.path(5)
    cells = refine(ColoredGraph(g))
    assert sorted(sorted(c) for c in cells) == [[0, 4], [1, 3], [2]]


def test_weighted_gadget_structure():
    g = Graph(3, ((0, 1, 2.0), (1, 2, 1.0)))
    cg, back = weighted_gadget(g)
    assert cg.n == 5
    assert cg.colors == (0, 0, 0, 2, 1)
    assert back == [0, 1, 2, None, None]
    cg_u, back_u = weighted_gadget(F.cycle(3))
    assert cg_u.n == 3 and back_u == [0, 1, 2]


def test_weights_break_symmetry():
    g = Graph(4, ((0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 2.0)))
    gens = graph_generators(g)
    assert group_order(gens) == 4
    orbits = term_orbits(gens, build_ising(g))
    assert orbits.blocks() == {frozenset({(0, 1), (2, 3)}), frozenset({(1, 2), (0, 3)})}


def test_restrict_rejects_mixing():
    with pytest.raises(OrbitError):
        GeneratorSet(3, ((2, 1, 0),)).restrict([0, 1, None])


def test_orbits_of_cycle_and_star():
    assert len(term_orbits(graph_generators(F.cycle(9)), build_maxcut(F.cycle(9)))) == 1
    h = build_maxcut(F.path(4))
    orbits = term_orbits(graph_generators(F.path(4)), h)
    assert orbits.blocks() == {frozenset({(0, 1), (2, 3)}), frozenset({(1, 2)})}
    assert [c.rep for c in orbits.classes] == [(0, 1), (1, 2)]


def test_orbit_partition_dict():
    h = build_maxcut(F.path(3))
    d = term_orbits(graph_generators(F.path(3)), h).to_dict()
    assert d == {"n_orbits": 1, "classes": [{"rep": [0, 1], "size": 2, "coeff": -0.5}]}


def test_inhomogeneous_coefficients_raise():
    h = Hamiltonian.from_terms(3, [((0, 1), 1.0), ((1, 2), 2.0)])
    with pytest.raises(OrbitError):
        term_orbits(GeneratorSet(3, ((2, 1, 0),)), h)


def test_non_term_image_raises():
    h = Hamiltonian.from_terms(3, [((0, 1), 1.0)])
    with pytest.raises(OrbitError):
        term_orbits(GeneratorSet(3, ((0, 2, 1),)), h)


def test_trivial_orbits():
    h = build_maxcut(F.cycle(5))
    assert len(trivial_orbits(h)) == 5


def test_timeout_raises_and_falls_back():
    g = F.wrapped_lattice(3, 4)
    with pytest.raises(SolverTimeoutError) as info:
        automorphism_generators(ColoredGraph(g), timeout=1e-9)
    assert info.value.exit_code == 4
    gens, timed_out = hamiltonian_generators(build_maxcut(g), timeout=1e-9)
    assert timed_out and gens.generators == ()


def test_union_find_smaller_root():
    uf = UnionFind(range(5))
    uf.union(4, 2)
    uf.union(2, 3)
    assert uf.find(3) == 2 and uf.find(4) == 2


def _relabel(g: Graph, perm):
    return Graph(g.n_vertices, tuple((perm[u], perm[v], w) for u, v, w in g.edges))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_order_invariant_under_relabelling(seed):
    rnd = random.Random(seed)
    n = rnd.randint(2, 8)
    edges = [(u, v, rnd.choice([1.0, 2.0])) for u, v in itertools.combinations(range(n), 2) if rnd.random() < 0.5]
    g = Graph(n, tuple(edges))
    perm = list(range(n))
    rnd.shuffle(perm)
    a = group_order(graph_generators(g))
    b = group_order(graph_generators(_relabel(g, perm)))
    assert a == b == len(brute_force_automorphisms(ColoredGraph(g)).generators)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(0, 100))
def test_orbits_invariant_under_generator_shuffle(seed, shuffle_seed):
    rnd = random.Random(seed)
    n = rnd.randint(3, 10)
    g = Graph(n, tuple((u, v, 1.0) for u, v in itertools.combinations(range(n), 2) if rnd.random() < 0.4))
    h = build_maxcut(g)
    gens = graph_generators(g)
    assert term_orbits(shuffled(gens, shuffle_seed), h) == term_orbits(gens, h)


def test_group_order_limit():
    from symqaoa.errors import InputError
    with pytest.raises(InputError):
        group_order(graph_generators(F.complete(10)), limit=1000)
    assert math.factorial(6) == group_order(graph_generators(F.complete(6)))
