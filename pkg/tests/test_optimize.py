import itertools
import math

import pytest

from symqaoa import families as F
from symqaoa.errors import DegenerateCorrelationError, InputError
from symqaoa.graphio import Graph
from symqaoa.hamiltonian import Hamiltonian, build_ising, build_maxcut, eval_classical
from symqaoa.optimize import (
    EliminationStep,
    OptConfig,
    brute_force_opt,
    choose_elimination,
    eliminate_variable,
    optimize_params,
    rqaoa_correlations,
    rqaoa_run,
)
from symqaoa.simulator import QaoaParams
from symqaoa.symmetry import graph_generators, term_orbits

FAST = OptConfig(workers=1)


def test_single_edge_reaches_one():
    h = build_maxcut(F.path(2))
    res = optimize_params(h, None, 1, FAST)
    assert res.best_energy == pytest.approx(1.0, abs=1e-9)


def test_triangle_beats_grid():
    # a 64x64 grid peaks at 1.9987785573749095; local refinement must do at least as well
    h = build_maxcut(F.cycle(3))
    orbits = term_orbits(graph_generators(F.cycle(3)), h)
    res = optimize_params(h, orbits, 1, FAST)
    assert 1.9987785573749095 <= res.best_energy <= 2.0 + 1e-12


def test_c4_optimum():
    h = build_maxcut(F.cycle(4))
    res = optimize_params(h, None, 1, FAST)
    assert res.best_energy == pytest.approx(3.0, abs=1e-9)


def test_trace_and_determinism():
    h = build_maxcut(F.cycle(5))
    a = optimize_params(h, None, 2, FAST)
    b = optimize_params(h, None, 2, FAST)
    assert a.best_params == b.best_params and a.best_energy == b.best_energy
    assert a.n_evaluations == len(a.trace) >= 64
    assert max(e for _, e in a.trace) == a.best_energy


def test_warm_start_seed_is_evaluated_first():
    h = build_maxcut(F.cycle(4))
    seed = QaoaParams((math.pi / 8,), (math.pi / 4,))
    res = optimize_params(h, None, 1, FAST, initial=[seed])
    assert res.trace[0][0] == seed


def test_bad_depth():
    with pytest.raises(InputError):
        optimize_params(build_maxcut(F.cycle(3)), None, 0)


def test_correlations_reduced_match_full():
    h = build_maxcut(F.petersen())
    orbits = term_orbits(graph_generators(F.petersen()), h)
    params = QaoaParams((0.3,), (0.7,))
    full = dict(rqaoa_correlations(h, None, params))
    red = dict(rqaoa_correlations(h, orbits, params))
    assert full.keys() == red.keys()
    for k in full:
        assert red[k] == pytest.approx(full[k], abs=1e-12)
        assert abs(full[k]) <= 1 + 1e-12


def test_choose_elimination_ties_and_degenerate():
    corrs = [((1, 2), -0.5), ((0, 3), 0.5), ((0, 1), 0.1)]
    step = choose_elimination(corrs)
    assert step.edge == (0, 3) and step.sign == 1
    assert choose_elimination([((0, 1), 0.2), ((1, 2), -0.9)]).sign == -1
    flat = [((1, 2), 0.0), ((0, 2), 1e-15)]
    with pytest.raises(DegenerateCorrelationError):
        choose_elimination(flat)
    assert choose_elimination(flat, allow_degenerate=True) == EliminationStep((0, 2), 1, 1e-15)


def test_eliminate_variable_structure():
    h = build_ising(Graph(3, ((0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0))))
    reduced, sub = eliminate_variable(h, EliminationStep((1, 2), -1, -0.9))
    # z2 = -z1: J12 z1 z2 -> -2, J02 z0 z2 -> -3 z0 z1, merged with J01
    assert reduced.n_qubits == 2
    assert reduced.offset == -2.0
    assert reduced.terms[0].support == (0, 1) and reduced.terms[0].coeff == -2.0
    assert sub.keep == (0, 1) and sub.eliminated == 2 and sub.anchor == 1
    assert sub.lift((0, 1)) == [0, 1, 0]


@pytest.mark.parametrize("g", [F.cycle(5), F.complete(4), Graph(4, ((0, 1, 1.0), (1, 2, -2.0), (2, 3, 0.5), (0, 3, 1.5)))])
def test_substitution_is_sound(g):
    h = build_ising(g)
    for t in h.terms:
        for sign in (1, -1):
            reduced, sub = eliminate_variable(h, EliminationStep(t.support, sign, 0.0))
            for x in itertools.product((0, 1), repeat=reduced.n_qubits):
                assert eval_classical(reduced, x) == pytest.approx(eval_classical(h, sub.lift(x)), abs=1e-12)


def test_eliminate_rejects_bad_steps():
    h = build_maxcut(F.cycle(4))
    with pytest.raises(InputError):
        eliminate_variable(h, EliminationStep((0, 2), 1, 0.5))
    with pytest.raises(InputError):
        eliminate_variable(h, EliminationStep((0, 1), 0, 0.5))


def test_brute_force_lexicographic_tie_break():
    x, val = brute_force_opt(build_maxcut(F.cycle(4)))
    assert x == (0, 1, 0, 1) and val == 4.0
    h = Hamiltonian.from_terms(3, [((0,), 1.0), ((2,), -1.0)])
    assert brute_force_opt(h) == ((0, 0, 1), 2.0)
    with pytest.raises(InputError):
        brute_force_opt(build_maxcut(F.cycle(25)))


@pytest.mark.parametrize("g,opt", [(F.cycle(6), 6.0), (F.complete_bipartite(3, 3), 9.0), (F.complete(4), 4.0)])
def test_rqaoa_reaches_optimum(g, opt):
    res = rqaoa_run(build_maxcut(g), 1, 2, FAST)
    assert res.objective_value == opt
    assert res.satisfies_constraints()
    assert len(res.steps) == g.n_vertices - 2


def test_rqaoa_c6_frozen_assignment():
    res = rqaoa_run(build_maxcut(F.cycle(6)), 1, 2, FAST)
    assert res.to_dict()["assignment"] == "010101"


def test_rqaoa_without_symmetry_agrees():
    h = build_maxcut(F.cycle(6))
    a = rqaoa_run(h, 1, 2, FAST)
    b = rqaoa_run(h, 1, 2, OptConfig(workers=1, use_symmetry=False))
    assert a.objective_value == b.objective_value == 6.0
    assert b.steps[0].n_orbits == 6 and a.steps[0].n_orbits == 1


def test_rqaoa_records_original_variables():
    res = rqaoa_run(build_maxcut(F.cycle(4)), 1, 2, FAST)
    assert all(i < j for i, j, _ in res.constraints())
    assert res.to_dict()["steps"][0]["n_terms"] == 4


def test_rqaoa_argument_checks():
    with pytest.raises(InputError):
        rqaoa_run(build_maxcut(F.cycle(4)), 1, 0)
    with pytest.raises(InputError):
        rqaoa_run(Hamiltonian.from_terms(3, [((0, 1, 2), 1.0)]), 1, 2)
