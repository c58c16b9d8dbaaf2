"""Symmetry-accelerated classical evaluation of QAOA energies for MaxCut and Ising problems."""

from symqaoa.errors import (
    ConeTooWideError,
    ConsistencyError,
    DegenerateCorrelationError,
    InputError,
    OrbitError,
    ResourceGuardError,
    SolverTimeoutError,
    SymqaoaError,
)
from symqaoa.graphio import Graph, edge_weight_classes, parse_edge_list, serialize_edge_list
from symqaoa.hamiltonian import Hamiltonian, Term, build_ising, build_maxcut, eval_classical
from symqaoa.simulator import QaoaParams

__all__ = [
    "ConeTooWideError",
    "ConsistencyError",
    "DegenerateCorrelationError",
    "Graph",
    "Hamiltonian",
    "InputError",
    "OrbitError",
    "QaoaParams",
    "ResourceGuardError",
    "SolverTimeoutError",
    "SymqaoaError",
    "Term",
    "build_ising",
    "build_maxcut",
    "edge_weight_classes",
    "eval_classical",
    "parse_edge_list",
    "serialize_edge_list",
]

__version__ = "0.1.0"
