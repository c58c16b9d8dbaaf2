import json

import numpy as np
import pytest

from symqaoa import families as F
from symqaoa.energy import (
    THREADS_ENV,
    TermEvaluator,
    default_workers,
    estimate_full_time,
    full_energy,
    reduced_energy,
    validate_partition,
)
from symqaoa.errors import ConeTooWideError, InputError, OrbitError
from symqaoa.hamiltonian import build_maxcut
from symqaoa.simulator import QaoaParams, full_state_energy_oracle
from symqaoa.symmetry import OrbitClass, OrbitPartition, graph_generators, term_orbits, trivial_orbits

PETERSEN_P2 = 10.6033507974478


def test_petersen_frozen_value():
    h = build_maxcut(F.petersen())
    params = QaoaParams((0.3, 0.2), (0.5, 0.7))
    orbits = term_orbits(graph_generators(F.petersen()), h)
    assert len(orbits) == 1
    full = full_energy(h, params).energy
    red = reduced_energy(h, orbits, params)
    assert full == pytest.approx(PETERSEN_P2, abs=1e-12)
    assert red.energy == pytest.approx(PETERSEN_P2, abs=1e-12)
    assert full_state_energy_oracle(h, params) == pytest.approx(PETERSEN_P2, abs=1e-12)
    assert red.n_terms_evaluated == 1
    assert red.per_class[0].multiplicity == 15


def test_simulation_counts():
    h = build_maxcut(F.cycle(10))
    orbits = term_orbits(graph_generators(F.cycle(10)), h)
    params = QaoaParams((0.2,), (0.4,))
    ev_full, ev_red = TermEvaluator(h), TermEvaluator(h)
    full_energy(h, params, evaluator=ev_full)
    reduced_energy(h, orbits, params, evaluator=ev_red)
    assert (ev_full.n_simulations, ev_red.n_simulations) == (10, 1)


def test_value_cache_skips_repeat_simulations():
    h = build_maxcut(F.cycle(6))
    ev = TermEvaluator(h, cache=True)
    params = QaoaParams((0.2,), (0.4,))
    a = full_energy(h, params, evaluator=ev).energy
    b = full_energy(h, params, evaluator=ev).energy
    assert a == b and ev.n_simulations == 6


def test_threads_agree_with_serial():
    h = build_maxcut(F.torus_grid(3, 4))
    params = QaoaParams((0.3, 0.1), (0.7, -0.2))
    a = full_energy(h, params, workers=1).energy
    b = full_energy(h, params, workers=3).energy
    assert a == pytest.approx(b, abs=1e-12)


def test_default_workers_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert default_workers() == 3
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(InputError):
        default_workers()


def test_partition_validation():
    h = build_maxcut(F.cycle(4))
    good = trivial_orbits(h)
    validate_partition(h, good)
    missing = OrbitPartition(good.classes[:-1])
    with pytest.raises(OrbitError):
        validate_partition(h, missing)
    wrong_coeff = OrbitPartition((OrbitClass((0, 1), ((0, 1), (1, 2), (2, 3), (0, 3)), -1.0),))
    with pytest.raises(OrbitError):
        reduced_energy(h, wrong_coeff, QaoaParams((0.1,), (0.1,)))
    bad_rep = OrbitPartition((OrbitClass((0, 2), ((0, 1), (1, 2), (2, 3), (0, 3)), -0.5),))
    with pytest.raises(OrbitError):
        validate_partition(h, bad_rep)


def test_width_guard_propagates():
    h = build_maxcut(F.complete(8))
    with pytest.raises(ConeTooWideError):
        full_energy(h, QaoaParams((0.1,), (0.1,)), max_width=5)


def test_evaluator_bound_to_hamiltonian():
    ev = TermEvaluator(build_maxcut(F.cycle(4)))
    with pytest.raises(InputError):
        full_energy(build_maxcut(F.cycle(5)), QaoaParams((0.1,), (0.1,)), evaluator=ev)


def test_report_json():
    h = build_maxcut(F.cycle(3))
    rep = reduced_energy(h, term_orbits(graph_generators(F.cycle(3)), h), QaoaParams((0.3,), (0.5,)))
    d = json.loads(rep.to_json())
    assert d["mode"] == "reduced"
    assert d["per_class"][0]["rep"] == [0, 1]
    assert d["energy"] == pytest.approx(1.9782918844306692, abs=1e-12)


def test_estimate_full_time():
    assert estimate_full_time(72000, 1000, 108112) == 7784064.0
    with pytest.raises(InputError):
        estimate_full_time(1.0, 0, 10)


def test_empty_hamiltonian_energy_is_offset():
    h = build_maxcut(F.path(1))
    assert full_energy(h, QaoaParams((0.1,), (0.2,))).energy == 0.0
    assert np.isclose(reduced_energy(h, trivial_orbits(h), QaoaParams((0.1,), (0.2,))).energy, 0.0)
