"""Reverse causal cones of Hamiltonian terms and the induced subproblems.

Gates acting entirely outside a term's cone commute through the measured
Z-product and cancel, so its depth-p expectation can be simulated on the
cone qubits alone. The subproblem keeps every term whose support lies inside
the final cone layer, not only those touching the inner layers: the extra
gates cancel in the expectation, and keeping them makes every layer
identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from symqaoa.errors import ConeTooWideError, InputError
from symqaoa.hamiltonian import Hamiltonian, Support, Term

DEFAULT_MAX_WIDTH = 26


@dataclass(frozen=True)
class Cone:
    layers: tuple[frozenset[int], ...]

    @property
    def qubits(self) -> frozenset[int]:
        return self.layers[-1]

    @property
    def width(self) -> int:
        return len(self.layers[-1])

    @property
    def depth(self) -> int:
        return len(self.layers) - 1


@dataclass(frozen=True)
class Subproblem:
    hamiltonian: Hamiltonian
    relabel: dict[int, int]
    measured: Support

    @property
    def width(self) -> int:
        return self.hamiltonian.n_qubits


def cone(h: Hamiltonian, term: Term | Sequence[int], p: int) -> Cone:
    support = term.support if isinstance(term, Term) else tuple(sorted(term))
    if support not in h.index:
        raise InputError(f"{list(support)} is not a term of the Hamiltonian")
    if p < 1:
        raise InputError("depth p must be at least 1")
    layer = frozenset(support)
    layers = [layer]
    qubit_terms = h.qubit_terms
    for _ in range(p):
        grown = set(layer)
        frontier_terms = {k for j in layer for k in qubit_terms[j]}
        for k in frontier_terms:
            grown.update(h.terms[k].support)
        layer = frozenset(grown)
        layers.append(layer)
    return Cone(tuple(layers))


def extract_subproblem(h: Hamiltonian, c: Cone, measured: Sequence[int] | None = None) -> Subproblem:
    """Terms with support inside the cone, relabelled densely in sorted original order, offset dropped."""
    qubits = sorted(c.qubits)
    relabel = {q: k for k, q in enumerate(qubits)}
    candidates = {k for q in qubits for k in h.qubit_terms[q]}
    terms = []
    for k in sorted(candidates):
        t = h.terms[k]
        if all(j in relabel for j in t.support):
            terms.append(Term(tuple(relabel[j] for j in t.support), t.coeff))
    if measured is None:
        measured = sorted(c.layers[0])
    local = tuple(relabel[j] for j in measured)
    return Subproblem(Hamiltonian(len(qubits), tuple(terms), 0.0), relabel, local)


def check_width(c: Cone, support: Sequence[int], max_width: int = DEFAULT_MAX_WIDTH):
    if c.width > max_width:
        raise ConeTooWideError(support, c.width, max_width)


def term_subproblem(h: Hamiltonian, support: Sequence[int], p: int, max_width: int = DEFAULT_MAX_WIDTH) -> Subproblem:
    c = cone(h, support, p)
    check_width(c, support, max_width)
    return extract_subproblem(h, c, tuple(sorted(support)))
