"""
Krylov-style ansatz sets built from products of a Hamiltonian's Pauli strings.

Order-``K`` candidates are all distinct products ``P_{m1} ... P_{mk}`` with
``k <= K`` of the generator strings, applied to a reference state. Candidates
are accepted greedily while the running Gram matrix stays well conditioned.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .coprocessor import PreparationCircuit, prepare
from .errors import DimensionError
from .numerics import GRAM_CUTOFF
from .operators import PauliString, PauliSum, basis_state, haar_state, pauli_multiply, uniform_state

MAX_AUTO_ORDER = 8


def krylov_pauli_strings(generators, order: int) -> list[PauliString]:
    """Distinct Pauli products of up to ``order`` generator strings, identity first.

    ``generators`` is a :class:`PauliSum` (only its strings matter) or a
    sequence of :class:`PauliString`. Products are enumerated by length and
    then lexicographically in the generator indices; phases are dropped.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    gens = generators.strings if isinstance(generators, PauliSum) else list(generators)
    if not gens:
        raise ValueError("no generator strings")
    n = gens[0].n
    seen = {PauliString.identity(n): None}
    # Length-k products extend length-(k-1) products. A repeated prefix product
    # only regenerates strings already met, so each level is deduplicated
    # without changing the first-appearance order.
    frontier = [PauliString.identity(n)]
    for _ in range(order):
        level: dict[PauliString, None] = {}
        for base in frontier:
            for g in gens:
                level.setdefault(pauli_multiply(base, g)[1], None)
        for p in level:
            seen.setdefault(p, None)
        frontier = list(level)
    return list(seen)


@dataclass(eq=False)
class AnsatzSet:
    """Accepted ansatz states of one party.

    ``states`` holds the statevectors as columns; ``preparations[0]`` is always
    the bare reference.
    """

    party: str
    reference: np.ndarray
    preparations: list[PreparationCircuit]
    states: np.ndarray
    order: int
    requested: int

    @property
    def size(self) -> int:
        return len(self.preparations)

    @property
    def complete(self) -> bool:
        return self.size >= self.requested

    @property
    def qubits(self) -> int:
        return self.preparations[0].pauli.n

    @property
    def strings(self) -> list[PauliString]:
        return [c.pauli for c in self.preparations]

    def prefix(self, size: int) -> "AnsatzSet":
        """The first ``size`` elements (a valid ansatz set by the nesting property)."""
        size = min(size, self.size)
        return AnsatzSet(self.party, self.reference, self.preparations[:size],
                         self.states[:, :size], self.order, size)

    def gram(self) -> np.ndarray:
        return self.states.conj().T @ self.states


def reference_state(kind, qubits: int, seed=None) -> np.ndarray:
    """``"zero"`` (|0...0>), ``"uniform"`` (|+...+>) or ``"random"`` (Haar, seeded)."""
    if isinstance(kind, np.ndarray):
        v = np.asarray(kind, dtype=complex)
        if v.shape != (1 << qubits,):
            raise DimensionError("reference vector has the wrong length")
        return v / np.linalg.norm(v)
    if kind == "zero":
        return basis_state(qubits, 0)
    if kind == "uniform":
        return uniform_state(1 << qubits)
    if kind == "random":
        return haar_state(1 << qubits, seed)
    raise ValueError(f"unknown reference kind {kind!r}")


def _min_rel_eig(g):
    w = np.linalg.eigvalsh(g)
    return w[0] / w[-1]


def build_ansatz(generators, reference: np.ndarray, order="auto", size: int = 1,
                 cutoff: float = GRAM_CUTOFF, party: str = "A") -> AnsatzSet:
    """Greedy linearly independent ansatz set of up to ``size`` states.

    Walks :func:`krylov_pauli_strings` in order and keeps a candidate when the
    Gram matrix of the kept states plus the candidate has smallest eigenvalue
    above ``cutoff * lambda_max``. With ``order="auto"`` the Krylov order is
    raised until ``size`` states are found or the string set stops growing.
    If fewer than ``size`` independent states exist a warning is issued and
    the maximal set found is returned (``complete`` is False).
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    reference = np.asarray(reference, dtype=complex)
    gens = generators.strings if isinstance(generators, PauliSum) else list(generators)
    n = gens[0].n if gens else int(np.log2(reference.size))
    if reference.shape != (1 << n,):
        raise DimensionError("reference does not match the generators' qubit count")
    reference = reference / np.linalg.norm(reference)

    orders = itertools.count(1) if order == "auto" else [int(order)]
    kept: list[PreparationCircuit] = []
    vecs: list[np.ndarray] = []
    gram = np.zeros((0, 0), dtype=complex)
    tried: set = set()
    prev_count = -1
    used_order = 1
    for k in orders:
        used_order = k
        strings = krylov_pauli_strings(gens, k) if gens else [PauliString.identity(n)]
        for p in strings:
            if len(kept) >= size:
                break
            if p in tried:
                continue
            tried.add(p)
            circ = PreparationCircuit(reference, p)
            v = prepare(circ)
            if vecs:
                overlaps = np.array([np.vdot(u, v) for u in vecs])
                g = np.block([[gram, overlaps[:, None]], [overlaps.conj()[None, :], np.ones((1, 1))]])
                if _min_rel_eig(g) <= cutoff:
                    continue
            else:
                g = np.ones((1, 1), dtype=complex)
            kept.append(circ)
            vecs.append(v)
            gram = g
        if len(kept) >= size or len(strings) == prev_count or k >= MAX_AUTO_ORDER:
            break
        prev_count = len(strings)
    if len(kept) < size:
        warnings.warn(f"party {party}: only {len(kept)} of {size} requested ansatz states are "
                      "linearly independent", RuntimeWarning, stacklevel=2)
    return AnsatzSet(party, reference, kept, np.stack(vecs, axis=1), used_order, size)
