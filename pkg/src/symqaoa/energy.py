"""Full and orbit-reduced QAOA energy evaluation."""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from symqaoa.errors import InputError, OrbitError
from symqaoa.hamiltonian import Hamiltonian
from symqaoa.lightcone import DEFAULT_MAX_WIDTH
from symqaoa.simulator import CompiledTerm, QaoaParams, batch_expectations, compile_term
from symqaoa.symmetry import OrbitPartition

THREADS_ENV = "SYMQAOA_THREADS"
# cones up to this width are simulated in stacked batches of about BATCH_AMPLITUDES amplitudes
BATCH_MAX_WIDTH = 10
BATCH_AMPLITUDES = 1 << 14


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer") from None


@dataclass(frozen=True)
class ClassResult:
    rep: tuple[int, ...]
    multiplicity: int
    coeff: float
    expectation: float
    cone_width: int


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    n_terms_evaluated: int
    mode: str
    offset: float
    per_class: tuple[ClassResult, ...] = field(repr=False, default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_class"] = [
            {**asdict(c), "rep": list(c.rep)} for c in self.per_class
        ]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class TermEvaluator:
    """Per-Hamiltonian simulation context.

    Compiled cones are cached by ``(support, p)``. With ``cache=True`` the
    expectation values themselves are memoised by ``(support, params)``,
    which is exact and pays off when an optimizer revisits points.
    ``n_simulations`` counts actual statevector runs.
    """

    def __init__(self, h: Hamiltonian, max_width: int = DEFAULT_MAX_WIDTH, workers: int | None = None,
                 cache: bool = False):
        self.h = h
        self.max_width = max_width
        self.workers = default_workers() if workers is None else max(1, int(workers))
        self.cache = cache
        self._compiled: dict[tuple, CompiledTerm] = {}
        self._values: dict[tuple, float] = {}
        self.n_simulations = 0

    def compiled(self, support: tuple[int, ...], p: int) -> CompiledTerm:
        key = (support, p)
        ct = self._compiled.get(key)
        if ct is None:
            ct = compile_term(self.h, support, p, self.max_width)
            self._compiled[key] = ct
        return ct

    @staticmethod
    def _jobs(todo: list[int], compiled: list[CompiledTerm]) -> list[list[int]]:
        """Group small cones of equal width into batches; larger cones run alone."""
        jobs: list[list[int]] = []
        open_batch: dict[int, list[int]] = {}
        for k in todo:
            w = compiled[k].width
            if w > BATCH_MAX_WIDTH:
                jobs.append([k])
                continue
            batch = open_batch.setdefault(w, [])
            batch.append(k)
            if len(batch) << w >= BATCH_AMPLITUDES:
                jobs.append(batch)
                del open_batch[w]
        jobs.extend(open_batch.values())
        return jobs

    def expectations(self, supports: Sequence[tuple[int, ...]], params: QaoaParams) -> list[tuple[float, int]]:
        """``(expectation, cone_width)`` for each support, in input order."""
        # compile serially so width-guard errors surface deterministically, naming the first bad term
        compiled = [self.compiled(s, params.p) for s in supports]
        pkey = (params.betas, params.gammas)
        todo = []
        results: list[float | None] = [None] * len(supports)
        for k, s in enumerate(supports):
            if self.cache and (s, pkey) in self._values:
                results[k] = self._values[(s, pkey)]
            else:
                todo.append(k)
        jobs = self._jobs(todo, compiled)

        def run(job):
            if len(job) == 1:
                return [compiled[job[0]].expectation(params)]
            return batch_expectations([compiled[k] for k in job], params)

        if self.workers > 1 and len(jobs) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                values = list(pool.map(run, jobs))
        else:
            values = [run(job) for job in jobs]
        self.n_simulations += len(todo)
        for job, vals in zip(jobs, values):
            for k, val in zip(job, vals):
                results[k] = val
                if self.cache:
                    self._values[(supports[k], pkey)] = val
        return [(results[k], compiled[k].width) for k in range(len(supports))]


def _evaluator(h, evaluator, max_width, workers):
    if evaluator is None:
        return TermEvaluator(h, max_width, workers)
    if evaluator.h is not h and evaluator.h != h:
        raise InputError("evaluator belongs to a different Hamiltonian")
    return evaluator


def full_energy(h: Hamiltonian, params: QaoaParams, *, evaluator: TermEvaluator | None = None,
                max_width: int = DEFAULT_MAX_WIDTH, workers: int | None = None) -> EnergyReport:
    ev = _evaluator(h, evaluator, max_width, workers)
    supports = [t.support for t in h.terms]
    values = ev.expectations(supports, params)
    per_class = []
    energy = h.offset
    for t, (val, width) in zip(h.terms, values):
        energy += t.coeff * val
        per_class.append(ClassResult(t.support, 1, t.coeff, val, width))
    return EnergyReport(energy, len(supports), "full", h.offset, tuple(per_class))


def validate_partition(h: Hamiltonian, orbits: OrbitPartition):
    """Every term in exactly one class, every class coefficient matching the Hamiltonian."""
    seen = set()
    for c in orbits.classes:
        if c.rep not in c.members:
            raise OrbitError(f"representative {list(c.rep)} is not a member of its class")
        for s in c.members:
            if s in seen:
                raise OrbitError(f"term {list(s)} appears in more than one class")
            seen.add(s)
            if s not in h.index:
                raise OrbitError(f"orbit member {list(s)} is not a term of the Hamiltonian")
            if h.terms[h.index[s]].coeff != c.coeff:
                raise OrbitError(f"term {list(s)} coefficient differs from its class coefficient {c.coeff}")
    if len(seen) != len(h.terms):
        missing = [list(t.support) for t in h.terms if t.support not in seen]
        raise OrbitError(f"orbit partition misses terms {missing[:5]}")


def reduced_energy(h: Hamiltonian, orbits: OrbitPartition, params: QaoaParams, *,
                   evaluator: TermEvaluator | None = None, max_width: int = DEFAULT_MAX_WIDTH,
                   workers: int | None = None) -> EnergyReport:
    """One simulation per orbit, weighted by orbit size."""
    validate_partition(h, orbits)
    ev = _evaluator(h, evaluator, max_width, workers)
    values = ev.expectations([c.rep for c in orbits.classes], params)
    per_class = []
    energy = h.offset
    for c, (val, width) in zip(orbits.classes, values):
        energy += c.multiplicity * c.coeff * val
        per_class.append(ClassResult(c.rep, c.multiplicity, c.coeff, val, width))
    return EnergyReport(energy, len(orbits.classes), "reduced", h.offset, tuple(per_class))


def estimate_full_time(t_actual: float, n_processed: int, n_total_terms: int) -> float:
    """Linear extrapolation of a partial run to all terms."""
    if n_processed < 1:
        raise InputError("at least one processed term is needed to extrapolate")
    return t_actual * n_total_terms / n_processed
