"""Diagonal cost Hamiltonians written as sums of Z-products plus a constant offset.

Spin convention: bit 0 <-> z = +1, bit 1 <-> z = -1, so Z|0> = +|0>.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from symqaoa.errors import InputError
from symqaoa.graphio import Graph

Support = tuple[int, ...]


@dataclass(frozen=True)
class Term:
    support: Support
    coeff: float


@dataclass(frozen=True, eq=True)
class Hamiltonian:
    """``H = offset * I + sum_k coeff_k * prod_{j in support_k} Z_j``.

    Use :meth:`from_terms` to build one; it merges repeated supports and
    drops zero coefficients.
    """

    n_qubits: int
    terms: tuple[Term, ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        seen = set()
        for t in self.terms:
            s = t.support
            if not s or list(s) != sorted(set(s)):
                raise InputError(f"term support {s} must be non-empty, sorted and duplicate-free")
            if s[0] < 0 or s[-1] >= self.n_qubits:
                raise InputError(f"term support {s} out of range for {self.n_qubits} qubits")
            if not math.isfinite(t.coeff) or t.coeff == 0:
                raise InputError(f"term {s} has coefficient {t.coeff}")
            if s in seen:
                raise InputError(f"duplicate term support {s}")
            seen.add(s)
        if not math.isfinite(self.offset):
            raise InputError("non-finite offset")

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[Sequence[int], float]], offset: float = 0.0):
        merged: dict[Support, float] = {}
        for support, coeff in terms:
            s = tuple(sorted(set(int(j) for j in support)))
            if len(s) != len(support):
                raise InputError(f"repeated qubit in support {tuple(support)}")
            merged[s] = merged.get(s, 0.0) + float(coeff)
        kept = tuple(Term(s, c) for s, c in merged.items() if c != 0)
        return cls(n_qubits, kept, float(offset))

    @cached_property
    def index(self) -> dict[Support, int]:
        return {t.support: k for k, t in enumerate(self.terms)}

    @cached_property
    def qubit_terms(self) -> list[list[int]]:
        """For every qubit, the indices of terms acting on it."""
        out: list[list[int]] = [[] for _ in range(self.n_qubits)]
        for k, t in enumerate(self.terms):
            for j in t.support:
                out[j].append(k)
        return out

    def term(self, support: Sequence[int]) -> Term:
        s = tuple(sorted(support))
        try:
            return self.terms[self.index[s]]
        except KeyError:
            raise InputError(f"no term with support {list(s)}") from None

    def is_quadratic(self) -> bool:
        return all(len(t.support) == 2 for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "offset": self.offset,
            "terms": [{"support": list(t.support), "coeff": t.coeff} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hamiltonian":
        return cls(
            int(d["n_qubits"]),
            tuple(Term(tuple(int(j) for j in t["support"]), float(t["coeff"])) for t in d["terms"]),
            float(d.get("offset", 0.0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Hamiltonian":
        return cls.from_dict(json.loads(text))


def build_maxcut(g: Graph) -> Hamiltonian:
    """Edge (u, v, w) contributes ``w * (I - Z_u Z_v) / 2``."""
    offset = sum(w for _, _, w in g.edges) / 2
    return Hamiltonian.from_terms(g.n_vertices, (((u, v), -w / 2) for u, v, w in g.edges), offset)


def build_ising(g: Graph) -> Hamiltonian:
    """``f(z) = sum J_ij z_i z_j`` with the edge weights as couplings."""
    return Hamiltonian.from_terms(g.n_vertices, (((u, v), w) for u, v, w in g.edges))


def hamiltonian_graph(h: Hamiltonian) -> Graph:
    """Coupling graph of a quadratic Hamiltonian, coefficients as edge weights."""
    if not h.is_quadratic():
        raise InputError("only quadratic Hamiltonians have a coupling graph")
    return Graph(h.n_qubits, tuple((t.support[0], t.support[1], t.coeff) for t in h.terms))


def eval_classical(h: Hamiltonian, x: Sequence[int]) -> float:
    if len(x) != h.n_qubits:
        raise InputError(f"bitstring has length {len(x)}, expected {h.n_qubits}")
    z = [1 - 2 * int(b) for b in x]
    total = h.offset
    for t in h.terms:
        prod = 1
        for j in t.support:
            prod *= z[j]
        total += t.coeff * prod
    return total


def _basis_index(n: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int32 if n < 31 else np.int64)


def parity_sign(n: int, support: Sequence[int], idx: np.ndarray | None = None) -> np.ndarray:
    """``prod_{j in support} z_j(x)`` for every basis index ``x`` (qubit 0 = LSB), as float64."""
    if idx is None:
        idx = _basis_index(n)
    parity = np.zeros(idx.shape, dtype=idx.dtype)
    for j in support:
        parity ^= idx >> j
    return 1.0 - 2.0 * (parity & 1)


def diagonal(h: Hamiltonian, include_offset: bool = True) -> np.ndarray:
    """Cost values ``f(x)`` for every basis index ``x`` (qubit 0 = LSB)."""
    n = h.n_qubits
    idx = _basis_index(n)
    out = np.full(2**n, h.offset if include_offset else 0.0)
    for t in h.terms:
        out += t.coeff * parity_sign(n, t.support, idx)
    return out
