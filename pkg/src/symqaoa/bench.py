"""Wall-clock and simulation-count comparison of full vs orbit-reduced energy evaluation."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass

from symqaoa.energy import TermEvaluator, full_energy, reduced_energy
from symqaoa.errors import ConsistencyError, InputError
from symqaoa.graphio import Graph
from symqaoa.hamiltonian import build_ising, build_maxcut
from symqaoa.lightcone import DEFAULT_MAX_WIDTH
from symqaoa.simulator import QaoaParams
from symqaoa.symmetry import DEFAULT_SOLVER_TIMEOUT, hamiltonian_generators, term_orbits

ENERGY_TOL = 1e-9

CSV_COLUMNS = ["Name", "|E|", "|V|", "N_orb", "t_aut", "t_s", "t_acc", "S", "p", "reduction_ratio",
               "n_sims_full", "n_sims_reduced", "workers"]


def speedup(t_s: float, t_aut: float, t_acc: float) -> float:
    return t_s / (t_aut + t_acc)


@dataclass(frozen=True)
class BenchReport:
    graph_name: str
    n_vertices: int
    n_edges: int
    n_orb: int
    t_aut: float
    t_s: float
    t_acc: float
    p: int
    n_sims_full: int = 0
    n_sims_reduced: int = 0
    workers: int = 1
    energy: float | None = None

    @classmethod
    def from_timings(cls, graph_name, n_edges, n_vertices, n_orb, t_aut, t_s, t_acc, p=1) -> "BenchReport":
        return cls(graph_name, n_vertices, n_edges, n_orb, t_aut, t_s, t_acc, p)

    @property
    def speedup(self) -> float:
        return speedup(self.t_s, self.t_aut, self.t_acc)

    @property
    def reduction_ratio(self) -> float:
        return self.n_edges / self.n_orb if self.n_orb else 1.0

    def row(self) -> dict:
        return {
            "Name": self.graph_name,
            "|E|": self.n_edges,
            "|V|": self.n_vertices,
            "N_orb": self.n_orb,
            "t_aut": self.t_aut,
            "t_s": self.t_s,
            "t_acc": self.t_acc,
            "S": self.speedup,
            "p": self.p,
            "reduction_ratio": self.reduction_ratio,
            "n_sims_full": self.n_sims_full,
            "n_sims_reduced": self.n_sims_reduced,
            "workers": self.workers,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(speedup=self.speedup, reduction_ratio=self.reduction_ratio)
        return d


def amortized_speedup(report: BenchReport, n_evals: int) -> float:
    """Speedup when one automorphism computation serves ``n_evals`` energy evaluations."""
    if n_evals < 1:
        raise InputError("n_evals must be at least 1")
    return n_evals * report.t_s / (report.t_aut + n_evals * report.t_acc)


def run_bench(g: Graph, p: int, params: QaoaParams | None = None, *, name: str = "graph",
              problem: str = "maxcut", max_width: int = DEFAULT_MAX_WIDTH, workers: int = 1,
              solver_timeout: float = DEFAULT_SOLVER_TIMEOUT) -> BenchReport:
    """Time symmetry detection, full evaluation and reduced evaluation on one instance.

    Both energies must agree to ``ENERGY_TOL`` before anything is reported.
    """
    if params is None:
        params = QaoaParams((0.3,) * p, (0.6,) * p)
    if params.p != p:
        raise InputError(f"params have depth {params.p}, expected {p}")
    h = build_maxcut(g) if problem == "maxcut" else build_ising(g)

    t0 = time.perf_counter()
    gens, _ = hamiltonian_generators(h, solver_timeout)
    orbits = term_orbits(gens, h)
    t_aut = time.perf_counter() - t0

    # warm-up on a throwaway evaluator so neither timed run pays first-call costs
    warm = TermEvaluator(h, max_width, workers)
    reduced_energy(h, orbits, params, evaluator=warm)

    ev_full = TermEvaluator(h, max_width, workers)
    t0 = time.perf_counter()
    full = full_energy(h, params, evaluator=ev_full)
    t_s = time.perf_counter() - t0

    ev_red = TermEvaluator(h, max_width, workers)
    t0 = time.perf_counter()
    red = reduced_energy(h, orbits, params, evaluator=ev_red)
    t_acc = time.perf_counter() - t0

    if abs(full.energy - red.energy) > ENERGY_TOL:
        raise ConsistencyError(
            f"full energy {full.energy!r} and reduced energy {red.energy!r} differ on {name}"
        )
    return BenchReport(name, g.n_vertices, g.n_edges, len(orbits), t_aut, t_s, t_acc, p,
                       ev_full.n_simulations, ev_red.n_simulations, workers, full.energy)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    return buf.getvalue()


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)
