"""Dense statevector QAOA engine.

Amplitudes are complex128 arrays indexed with qubit 0 as the least
significant bit. One QAOA layer is ``exp(-i*gamma*H)`` followed by
``exp(-i*beta*sum_j X_j)``, starting from ``|+>^n``. The Hamiltonian offset
is never applied (it is a global phase).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from symqaoa.errors import InputError, ResourceGuardError
from symqaoa.hamiltonian import Hamiltonian, Term, diagonal, parity_sign
from symqaoa.lightcone import DEFAULT_MAX_WIDTH, term_subproblem

ORACLE_MAX_QUBITS = 20


@dataclass(frozen=True)
class QaoaParams:
    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        gammas = tuple(float(g) for g in self.gammas)
        if len(betas) != len(gammas):
            raise InputError(f"{len(betas)} betas but {len(gammas)} gammas")
        if not betas:
            raise InputError("depth p must be at least 1")
        if not all(math.isfinite(a) for a in betas + gammas):
            raise InputError("angles must be finite")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "gammas", gammas)

    @property
    def p(self) -> int:
        return len(self.betas)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "QaoaParams":
        """Inverse of :meth:`vector`: ``[beta_1..beta_p, gamma_1..gamma_p]``."""
        p = len(x) // 2
        return cls(tuple(x[:p]), tuple(x[p:]))

    def vector(self) -> np.ndarray:
        return np.array(self.betas + self.gammas)

    def to_dict(self) -> dict:
        return {"p": self.p, "betas": list(self.betas), "gammas": list(self.gammas)}


def _guard(n: int, max_width: int):
    if n > max_width:
        raise ResourceGuardError(f"{n} qubits exceeds the statevector limit of {max_width}")


def prepare_plus(n: int, max_width: int = DEFAULT_MAX_WIDTH) -> np.ndarray:
    if n < 0:
        raise InputError("negative qubit count")
    _guard(n, max_width)
    return np.full(2**n, 2.0 ** (-n / 2), dtype=np.complex128)


def _n_qubits(sv: np.ndarray) -> int:
    n = int(sv.size).bit_length() - 1
    if sv.ndim != 1 or 2**n != sv.size:
        raise InputError("statevector length must be a power of two")
    return n


def apply_diagonal_phase(sv: np.ndarray, diag: np.ndarray, gamma: float) -> np.ndarray:
    sv *= np.exp(-1j * gamma * diag)
    return sv


def apply_phase_layer(sv: np.ndarray, h: Hamiltonian, gamma: float) -> np.ndarray:
    if h.n_qubits != _n_qubits(sv):
        raise InputError(f"Hamiltonian has {h.n_qubits} qubits, state has {_n_qubits(sv)}")
    return apply_diagonal_phase(sv, diagonal(h, include_offset=False), gamma)


_MIXER_GROUP = 4


def _rx_blocks(n: int, beta: float) -> list[tuple[int, int, np.ndarray]]:
    """``(first qubit, block size, Rx^{(x)k})`` covering qubits ``0..n-1``."""
    c, s = math.cos(beta), -1j * math.sin(beta)
    rx = np.array([[c, s], [s, c]])
    mats = {1: rx}
    out = []
    for q in range(0, n, _MIXER_GROUP):
        k = min(_MIXER_GROUP, n - q)
        if k not in mats:
            m = rx
            for _ in range(k - 1):
                m = np.kron(m, rx)
            mats[k] = m
        out.append((q, k, mats[k]))
    return out


def _mix(flat: np.ndarray, n: int, beta: float) -> np.ndarray:
    """Mixer on the low ``n`` qubits of a flat array holding one or more stacked states."""
    for q, k, m in _rx_blocks(n, beta):
        flat = np.matmul(m, flat.reshape(-1, 2**k, 2**q)).reshape(-1)
    return flat


def apply_mixer_layer(sv: np.ndarray, beta: float) -> np.ndarray:
    """``exp(-i*beta*X)`` on every qubit, in place.

    Qubits are processed in blocks of up to four, each as one batched
    16x16 matrix product, which keeps numpy call overhead low.
    """
    n = _n_qubits(sv)
    out = _mix(sv, n, beta)
    if out is not sv:
        sv[...] = out
    return sv


def z_product_expectation(sv: np.ndarray, support: Sequence[int]) -> float:
    n = _n_qubits(sv)
    if any(not 0 <= j < n for j in support):
        raise InputError(f"support {list(support)} outside a {n}-qubit state")
    probs = sv.real**2 + sv.imag**2
    return float(probs @ parity_sign(n, support))


@dataclass(frozen=True)
class CompiledTerm:
    """Precomputed cost diagonal and measurement signs for one term's cone at fixed depth.

    When the diagonal takes few distinct values (integer weights), the phase
    is looked up from ``levels`` via ``level_index`` instead of exponentiating
    every amplitude.
    """

    support: tuple[int, ...]
    width: int
    diag: np.ndarray
    sign: np.ndarray
    levels: np.ndarray | None = None
    level_index: np.ndarray | None = None

    def _phase(self, sv: np.ndarray, gamma: float):
        if self.levels is None:
            apply_diagonal_phase(sv, self.diag, gamma)
        else:
            sv *= np.exp(-1j * gamma * self.levels)[self.level_index]

    def expectation(self, params: QaoaParams) -> float:
        sv = prepare_plus(self.width, max_width=self.width)
        for beta, gamma in zip(params.betas, params.gammas):
            self._phase(sv, gamma)
            sv = _mix(sv, self.width, beta)
        probs = sv.real**2 + sv.imag**2
        return float(probs @ self.sign)


def batch_expectations(terms: Sequence[CompiledTerm], params: QaoaParams) -> list[float]:
    """Simulate several equal-width cones side by side as rows of one array.

    Numerically identical to calling :meth:`CompiledTerm.expectation` on each;
    it only amortises numpy call overhead for small cones.
    """
    if not terms:
        return []
    n = terms[0].width
    if any(t.width != n for t in terms):
        raise InputError("batched cones must share a width")
    diag = np.stack([t.diag for t in terms])
    sv = np.full(diag.shape, 2.0 ** (-n / 2), dtype=np.complex128)
    for beta, gamma in zip(params.betas, params.gammas):
        sv *= np.exp(-1j * gamma * diag)
        sv = _mix(sv.reshape(-1), n, beta).reshape(diag.shape)
    probs = sv.real**2 + sv.imag**2
    return [float(v) for v in np.einsum("ij,ij->i", probs, np.stack([t.sign for t in terms]))]


_MAX_LEVELS = 256


def compile_term(h: Hamiltonian, support: Sequence[int], p: int, max_width: int = DEFAULT_MAX_WIDTH) -> CompiledTerm:
    sub = term_subproblem(h, support, p, max_width)
    n = sub.width
    sign = parity_sign(n, sub.measured)
    diag = diagonal(sub.hamiltonian, include_offset=False)
    levels, index = np.unique(diag, return_inverse=True)
    if len(levels) > _MAX_LEVELS:
        levels = index = None
    else:
        index = index.astype(np.uint8)
    return CompiledTerm(tuple(sorted(support)), n, diag, sign, levels, index)


def term_expectation(
    h: Hamiltonian, term: Term | Sequence[int], params: QaoaParams, max_width: int = DEFAULT_MAX_WIDTH
) -> float:
    """``<Z_S>`` in the depth-p QAOA state, simulated on the term's reverse causal cone."""
    support = term.support if isinstance(term, Term) else tuple(term)
    return compile_term(h, support, params.p, max_width).expectation(params)


def qaoa_state(h: Hamiltonian, params: QaoaParams, max_width: int = ORACLE_MAX_QUBITS) -> np.ndarray:
    sv = prepare_plus(h.n_qubits, max_width)
    diag = diagonal(h, include_offset=False)
    for beta, gamma in zip(params.betas, params.gammas):
        apply_diagonal_phase(sv, diag, gamma)
        apply_mixer_layer(sv, beta)
    return sv


def full_state_term_expectations(h: Hamiltonian, params: QaoaParams) -> dict[tuple[int, ...], float]:
    """Per-term ``<Z_S>`` from the complete n-qubit circuit (verification oracle)."""
    if h.n_qubits > ORACLE_MAX_QUBITS:
        raise ResourceGuardError(f"oracle limited to {ORACLE_MAX_QUBITS} qubits, got {h.n_qubits}")
    sv = qaoa_state(h, params)
    return {t.support: z_product_expectation(sv, t.support) for t in h.terms}


def full_state_energy_oracle(h: Hamiltonian, params: QaoaParams) -> float:
    if h.n_qubits > ORACLE_MAX_QUBITS:
        raise ResourceGuardError(f"oracle limited to {ORACLE_MAX_QUBITS} qubits, got {h.n_qubits}")
    sv = qaoa_state(h, params)
    probs = sv.real**2 + sv.imag**2
    return float(probs @ diagonal(h, include_offset=True))
