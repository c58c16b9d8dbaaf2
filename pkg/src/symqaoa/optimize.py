"""Parameter training (grid seeding + Nelder-Mead) and the recursive QAOA driver."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from symqaoa.energy import TermEvaluator, full_energy, reduced_energy
from symqaoa.errors import DegenerateCorrelationError, InputError
from symqaoa.hamiltonian import Hamiltonian, diagonal, eval_classical
from symqaoa.lightcone import DEFAULT_MAX_WIDTH
from symqaoa.simulator import QaoaParams
from symqaoa.symmetry import DEFAULT_SOLVER_TIMEOUT, OrbitPartition, hamiltonian_generators, term_orbits

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 24
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class OptConfig:
    grid_points: int = 8
    n_starts: int = 3
    maxfev: int = 400
    xatol: float = 1e-7
    fatol: float = 1e-10
    seed: int = 0
    # seeds are perturbed by uniform noise of this amplitude (radians); 0 keeps the grid exact
    jitter: float = 0.0
    max_width: int = DEFAULT_MAX_WIDTH
    workers: int | None = None
    # RQAOA knobs
    solver_timeout: float = DEFAULT_SOLVER_TIMEOUT
    use_partial_generators: bool = False
    use_symmetry: bool = True
    allow_degenerate: bool = False
    warm_start: bool = False


@dataclass
class OptResult:
    best_params: QaoaParams
    best_energy: float
    n_evaluations: int
    trace: list[tuple[QaoaParams, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "params": self.best_params.to_dict(),
            "energy": self.best_energy,
            "n_evaluations": self.n_evaluations,
        }


def _grid_seeds(p: int, points: int) -> list[QaoaParams]:
    """``points x points`` grid over beta in [0, pi/2), gamma in [0, pi), as constant schedules for p > 1."""
    betas = [0.5 * math.pi * k / points for k in range(points)]
    gammas = [math.pi * k / points for k in range(points)]
    return [QaoaParams((b,) * p, (g,) * p) for b in betas for g in gammas]


def optimize_params(h: Hamiltonian, orbits: OrbitPartition | None, p: int, config: OptConfig = OptConfig(),
                    initial: Sequence[QaoaParams] = ()) -> OptResult:
    """Maximise the QAOA energy. Uses the reduced evaluator whenever ``orbits`` is given."""
    if p < 1:
        raise InputError("depth p must be at least 1")
    ev = TermEvaluator(h, config.max_width, config.workers, cache=True)
    trace: list[tuple[QaoaParams, float]] = []

    def energy(params: QaoaParams) -> float:
        if orbits is None:
            e = full_energy(h, params, evaluator=ev).energy
        else:
            e = reduced_energy(h, orbits, params, evaluator=ev).energy
        trace.append((params, e))
        return e

    rng = np.random.default_rng(config.seed)
    seeds = list(initial) + _grid_seeds(p, config.grid_points)
    scored = [(energy(s), k, s) for k, s in enumerate(seeds)]
    scored.sort(key=lambda t: (-t[0], t[1]))

    for _, _, seed in scored[: config.n_starts]:
        x0 = seed.vector()
        if config.jitter:
            x0 = x0 + rng.uniform(-config.jitter, config.jitter, size=x0.shape)
        minimize(
            lambda x: -energy(QaoaParams.from_vector(x)),
            x0,
            method="Nelder-Mead",
            options={"xatol": config.xatol, "fatol": config.fatol, "maxfev": config.maxfev},
        )

    best = max(range(len(trace)), key=lambda k: (trace[k][1], -k))
    return OptResult(trace[best][0], trace[best][1], len(trace), trace)


def rqaoa_correlations(h: Hamiltonian, orbits: OrbitPartition | None, params: QaoaParams, *,
                       max_width: int = DEFAULT_MAX_WIDTH, workers: int | None = None,
                       evaluator: TermEvaluator | None = None) -> list[tuple[tuple[int, int], float]]:
    """``<Z_i Z_j>`` for every quadratic term, one simulation per orbit."""
    if not h.is_quadratic():
        raise InputError("correlations are defined for quadratic Hamiltonians only")
    ev = evaluator or TermEvaluator(h, max_width, workers)
    if orbits is None:
        values = ev.expectations([t.support for t in h.terms], params)
        return [(t.support, v) for t, (v, _) in zip(h.terms, values)]
    values = ev.expectations([c.rep for c in orbits.classes], params)
    by_support = {}
    for c, (v, _) in zip(orbits.classes, values):
        for s in c.members:
            by_support[s] = v
    return [(t.support, by_support[t.support]) for t in h.terms]


@dataclass(frozen=True)
class EliminationStep:
    edge: tuple[int, int]
    sign: int
    correlation: float


@dataclass(frozen=True)
class Substitution:
    """Record of ``z_eliminated = sign * z_anchor`` in a parent instance.

    ``keep[k]`` is the parent index of reduced variable ``k``.
    """

    eliminated: int
    anchor: int
    sign: int
    keep: tuple[int, ...]

    def lift(self, x: Sequence[int]) -> list[int]:
        """Parent assignment implied by a reduced assignment (bits, 0 <-> z=+1)."""
        parent = [0] * (len(self.keep) + 1)
        for k, orig in enumerate(self.keep):
            parent[orig] = int(x[k])
        a = parent[self.anchor]
        parent[self.eliminated] = a if self.sign > 0 else 1 - a
        return parent


def eliminate_variable(h: Hamiltonian, step: EliminationStep) -> tuple[Hamiltonian, Substitution]:
    """Substitute ``z_j = sign * z_i`` (j the larger index of the edge) into a quadratic Hamiltonian."""
    i, j = sorted(step.edge)
    if (i, j) not in h.index:
        raise InputError(f"edge ({i}, {j}) is not a term of the instance")
    if not h.is_quadratic():
        raise InputError("elimination is defined for quadratic Hamiltonians only")
    if step.sign not in (1, -1):
        raise InputError("sign must be +1 or -1")
    offset = h.offset
    terms = []
    for t in h.terms:
        a, b = t.support
        if (a, b) == (i, j):
            offset += step.sign * t.coeff
        elif j in (a, b):
            other = a if b == j else b
            terms.append(((i, other), step.sign * t.coeff))
        else:
            terms.append(((a, b), t.coeff))
    keep = tuple(v for v in range(h.n_qubits) if v != j)
    new_index = {v: k for k, v in enumerate(keep)}
    reduced = Hamiltonian.from_terms(
        h.n_qubits - 1, (((new_index[a], new_index[b]), c) for (a, b), c in terms), offset
    )
    return reduced, Substitution(j, i, step.sign, keep)


def choose_elimination(correlations: Sequence[tuple[tuple[int, int], float]],
                       allow_degenerate: bool = False) -> EliminationStep:
    """Largest |correlation|; ties go to the lexicographically smallest edge."""
    if not correlations:
        raise InputError("no correlations to choose from")
    top = max(abs(c) for _, c in correlations)
    if top < DEGENERATE_TOL:
        if not allow_degenerate:
            raise DegenerateCorrelationError(
                "all correlations vanish; QAOA parameters carry no information about any edge"
            )
        edge = min(e for e, _ in correlations)
        corr = dict(correlations)[edge]
        return EliminationStep(edge, 1, corr)
    edge, corr = min(((e, c) for e, c in correlations if abs(c) >= top - DEGENERATE_TOL), key=lambda t: t[0])
    return EliminationStep(edge, 1 if corr > 0 else -1, corr)


def brute_force_opt(h: Hamiltonian, tol: float = 1e-9) -> tuple[tuple[int, ...], float]:
    """Exhaustive maximisation; among (numerically) tied optima the lexicographically smallest bitstring."""
    n = h.n_qubits
    if n > BRUTE_FORCE_MAX_N:
        raise InputError(f"brute force limited to {BRUTE_FORCE_MAX_N} variables, got {n}")
    if n == 0:
        return (), h.offset
    vals = diagonal(h)
    top = vals.max()
    cands = np.flatnonzero(vals >= top - tol * max(1.0, abs(top)))
    # lexicographic order on (x_0, ..., x_{n-1}) is numeric order of the bit-reversed index
    rev = np.zeros_like(cands)
    for j in range(n):
        rev |= ((cands >> j) & 1) << (n - 1 - j)
    best = int(cands[np.argmin(rev)])
    x = tuple((best >> j) & 1 for j in range(n))
    return x, eval_classical(h, x)


@dataclass
class RqaoaStepRecord:
    step: EliminationStep
    variables: tuple[int, int]
    n_orbits: int
    n_terms: int
    energy: float
    params: QaoaParams


@dataclass
class RqaoaResult:
    steps: list[RqaoaStepRecord]
    final_assignment: tuple[int, ...]
    objective_value: float

    def constraints(self) -> list[tuple[int, int, int]]:
        """``(anchor, eliminated, sign)`` in original variable indices."""
        return [(r.variables[0], r.variables[1], r.step.sign) for r in self.steps]

    def satisfies_constraints(self) -> bool:
        z = [1 - 2 * b for b in self.final_assignment]
        return all(z[j] == s * z[i] for i, j, s in self.constraints())

    def to_dict(self) -> dict:
        return {
            "steps": [
                {
                    "edge": list(r.variables),
                    "sign": r.step.sign,
                    "correlation": r.step.correlation,
                    "n_orbits": r.n_orbits,
                    "n_terms": r.n_terms,
                    "energy": r.energy,
                    "params": r.params.to_dict(),
                }
                for r in self.steps
            ],
            "assignment": "".join(str(b) for b in self.final_assignment),
            "objective": self.objective_value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def rqaoa_run(h: Hamiltonian, p: int, n_cutoff: int, config: OptConfig = OptConfig()) -> RqaoaResult:
    """Recursive QAOA: eliminate the most strongly correlated edge until ``n_cutoff`` variables remain."""
    if n_cutoff < 1:
        raise InputError("n_cutoff must be at least 1")
    if not h.is_quadratic():
        raise InputError("RQAOA needs a quadratic Hamiltonian")
    current = h
    labels = list(range(h.n_qubits))  # current index -> original variable
    subs: list[Substitution] = []
    records: list[RqaoaStepRecord] = []
    previous: QaoaParams | None = None
    while current.n_qubits > n_cutoff and current.terms:
        if config.use_symmetry:
            gens, timed_out = hamiltonian_generators(current, config.solver_timeout, config.use_partial_generators)
            if timed_out:
                logger.warning("automorphism search timed out; continuing with %d generators", len(gens.generators))
            orbits = term_orbits(gens, current)
        else:
            orbits = None
        warm = [previous] if config.warm_start and previous is not None and previous.p == p else []
        opt = optimize_params(current, orbits, p, config, initial=warm)
        previous = opt.best_params
        corrs = rqaoa_correlations(current, orbits, opt.best_params, max_width=config.max_width,
                                   workers=config.workers)
        step = choose_elimination(corrs, config.allow_degenerate)
        i, j = step.edge
        records.append(RqaoaStepRecord(
            step, (labels[i], labels[j]),
            len(orbits) if orbits is not None else len(current.terms),
            len(current.terms), opt.best_energy, opt.best_params,
        ))
        logger.info("eliminate x%d = %+d * x%d (corr %.6f)", labels[j], step.sign, labels[i], step.correlation)
        current, sub = eliminate_variable(current, step)
        subs.append(sub)
        labels = [labels[v] for v in sub.keep]

    x = brute_force_opt(current)[0] if current.terms else (0,) * current.n_qubits
    for sub in reversed(subs):
        x = sub.lift(x)
    x = tuple(x)
    return RqaoaResult(records, x, eval_classical(h, x))
