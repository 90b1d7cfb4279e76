"""
Simulated quantum co-processor.

Ansatz states are Pauli strings applied to a fixed reference state. Overlaps
and matrix elements are read out the way a device would: as expectation
values of (phase-tracked) Pauli strings, each estimated with a pair of
Hadamard tests. In exact mode the device returns the expectation itself; in
sampled mode every real scalar is replaced by ``2 k / shots - 1`` with ``k``
the number of ancilla-0 outcomes drawn from the circuit's probability law.

Random streams are keyed by ``(seed, tag, observable, part)`` so that the same
physical measurement always produces the same data, independent of the order
in which entries are assembled.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .operators import PauliString, PauliSum, hermitize, pauli_multiply

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


@dataclass(frozen=True)
class BackendConfig:
    """Shot budget and seed of the simulated device.

    ``mode="exact"`` returns expectation values (infinitely many shots);
    ``mode="sampled"`` draws ``shots`` outcomes per estimated real scalar.
    """

    mode: str = "exact"
    shots: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown backend mode {self.mode!r}")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError("sampled mode needs shots >= 1")

    @classmethod
    def from_shots(cls, shots: int, seed: int = 0) -> "BackendConfig":
        """``shots=0`` selects exact mode (the CLI convention)."""
        if shots == 0:
            return cls("exact", 0, seed)
        return cls("sampled", int(shots), seed)

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    def rng(self, *key) -> np.random.Generator:
        """Independent generator for one measurement job."""
        words = [int(self.seed) & 0xFFFFFFFFFFFFFFFF]
        for k in key:
            if isinstance(k, str):
                words.append(zlib.crc32(k.encode()))
            else:
                words.append(int(k))
        return np.random.default_rng(np.random.SeedSequence(words))


EXACT = BackendConfig()


@dataclass(frozen=True, eq=False)
class PreparationCircuit:
    """``pauli`` applied to ``reference``."""

    reference: np.ndarray
    pauli: PauliString

    def __post_init__(self):
        if self.reference.shape != (1 << self.pauli.n,):
            raise DimensionError("reference length does not match the Pauli string")


def prepare(c: PreparationCircuit) -> np.ndarray:
    v = c.pauli.apply(np.asarray(c.reference, dtype=complex))
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# single-shot-law primitives
# ---------------------------------------------------------------------------

def _apply_unitary(u, psi):
    if isinstance(u, PauliString):
        return u.apply(psi)
    if isinstance(u, tuple):
        phase, p = u
        return phase * p.apply(psi)
    if callable(u):
        return u(psi)
    return np.asarray(u) @ psi


def hadamard_probability(psi: np.ndarray, u, b: int) -> float:
    """Probability of ancilla outcome 0 in the Hadamard test.

    Simulates ``H`` on the ancilla, controlled-``U``, a phase gate on the
    ancilla, ``H``, measurement. For ``b=1`` the phase gate is ``S^dagger``
    so that ``2 P(0) - 1 = Im <psi|U|psi>``; for ``b=0`` it is the identity
    and ``2 P(0) - 1 = Re <psi|U|psi>``.
    """
    psi = np.asarray(psi, dtype=complex)
    # ancilla-major register: row a holds the system amplitude for ancilla = a
    reg = np.stack([psi, np.zeros_like(psi)])
    reg = _H @ reg
    reg[1] = _apply_unitary(u, reg[1])
    if b:
        reg[1] = -1j * reg[1]
    reg = _H @ reg
    return float(np.vdot(reg[0], reg[0]).real)


def _draw(p0, cfg: BackendConfig, rng: np.random.Generator):
    p0 = np.clip(p0, 0.0, 1.0)
    k = rng.binomial(cfg.shots, p0)
    return 2.0 * k / cfg.shots - 1.0


def hadamard_test(psi: np.ndarray, u, b: int, cfg: BackendConfig = EXACT, key=()) -> float:
    """Estimate ``Re <psi|U|psi>`` (``b=0``) or ``Im <psi|U|psi>`` (``b=1``).

    ``u`` is a :class:`PauliString`, a ``(phase, PauliString)`` pair, a
    unitary matrix, or a callable applying the unitary.
    """
    p0 = hadamard_probability(psi, u, b)
    if cfg.exact:
        return 2.0 * p0 - 1.0
    return float(_draw(p0, cfg, cfg.rng("hadamard", *key, b)))


def swap_test(psi: np.ndarray, phi: np.ndarray, cfg: BackendConfig = EXACT, key=()) -> float:
    """Estimate ``|<psi|phi>|^2`` from ``P(0) = (1 + |<psi|phi>|^2) / 2``.

    Only recovers the overlap itself when it is known to be real non-negative.
    """
    if np.shape(psi) != np.shape(phi):
        raise DimensionError("SWAP test needs equal register sizes")
    f = abs(np.vdot(psi, phi)) ** 2
    if cfg.exact:
        return float(f)
    return float(_draw((1.0 + f) / 2.0, cfg, cfg.rng("swap", *key)))


def estimate_pauli_expectation(state: np.ndarray, p: PauliString, phase: complex = 1,
                               cfg: BackendConfig = EXACT, key=()) -> complex:
    """``<state| phase * P |state>`` from two Hadamard tests (real and imaginary part)."""
    u = (phase, p)
    re = hadamard_test(state, u, 0, cfg, key)
    im = hadamard_test(state, u, 1, cfg, key)
    return complex(re, im)


def estimate(z: np.ndarray, cfg: BackendConfig, *key) -> np.ndarray:
    """Simulated readout of an array of complex expectation values.

    Each real and imaginary part is an independent Hadamard-test estimate with
    ``P(0) = (1 + part) / 2``. Exact mode returns ``z`` unchanged.
    """
    z = np.asarray(z, dtype=complex)
    if cfg.exact:
        return z
    re = _draw((1.0 + z.real) / 2.0, cfg, cfg.rng(*key, "re"))
    im = _draw((1.0 + z.imag) / 2.0, cfg, cfg.rng(*key, "im"))
    return re + 1j * im


# ---------------------------------------------------------------------------
# reduced-problem data
# ---------------------------------------------------------------------------

def _check_shared_reference(circuits):
    if not circuits:
        raise ValueError("no preparation circuits")
    ref = circuits[0].reference
    for c in circuits[1:]:
        if c.reference is not ref and not np.array_equal(c.reference, ref):
            raise ValueError("preparation circuits must share one reference state")
    return ref


def _states(circuits) -> np.ndarray:
    return np.stack([prepare(c) for c in circuits], axis=1)


def pauli_product_entry(reference: np.ndarray, left: PauliString, middle: PauliString,
                        right: PauliString) -> complex:
    """``<eta| left middle right |eta>`` reduced to one phase-tracked Pauli expectation."""
    ph1, p = pauli_multiply(left, middle)
    ph2, p = pauli_multiply(p, right)
    return ph1 * ph2 * np.vdot(reference, p.apply(reference))


def _sandwich(states, p: PauliString) -> np.ndarray:
    # exact <psi_i| P |psi_j>, equal to the phase-tracked expectation on the reference
    return states.conj().T @ p.apply(states)


def assemble_gram(circuits, cfg: BackendConfig = EXACT, party: str = "A") -> np.ndarray:
    """Gram matrix ``G[i, j] = <psi_i|psi_j>`` of Pauli-prepared states.

    Entries are read out as ``<eta| P_i P_j |eta>``; the result is Hermitized
    and its diagonal set to 1.
    """
    _check_shared_reference(circuits)
    states = _states(circuits)
    ident = PauliString.identity(circuits[0].pauli.n)
    g = estimate(_sandwich(states, ident), cfg, "gram", party, ident.label)
    g = hermitize(g)
    np.fill_diagonal(g, 1.0)
    return g


def _block(states, op: PauliSum, cfg, tag, party):
    out = np.zeros((states.shape[1],) * 2, dtype=complex)
    for c, p in op.terms:
        key = ("gram", party, p.label) if p.is_identity() else (tag, party, p.label)
        out += c * estimate(_sandwich(states, p), cfg, *key)
    return hermitize(out)


def assemble_kron_blocks(circuits, ops, cfg: BackendConfig = EXACT, party: str = "A") -> list[np.ndarray]:
    """Blocks ``B_m[i, j] = <psi_i| K_m |psi_j>`` for single-party Pauli sums ``K_m``.

    Each Pauli term is one measured observable; the identity term reuses the
    Gram-matrix readout so ``ops=[identity]`` reproduces the Gram data.
    """
    _check_shared_reference(circuits)
    states = _states(circuits)
    n = circuits[0].pauli.n
    blocks = []
    for op in ops:
        if op.qubits != n:
            raise DimensionError(f"operator on {op.qubits} qubits for a {n}-qubit party")
        blocks.append(_block(states, op, cfg, "block", party))
    return blocks


def assemble_d(circuits_a, circuits_b, c: PauliSum, cfg: BackendConfig = EXACT) -> np.ndarray:
    """``D[(i,k),(j,l)] = <psi_i phi_k| C |psi_j phi_l>`` for a Pauli-sum ``C``.

    Each term ``P_m = P_A (x) P_B`` gives a joint Pauli expectation on the
    product reference; its exact value factorizes over the two parties, which
    is what makes the simulation cheap.
    """
    _check_shared_reference(circuits_a)
    _check_shared_reference(circuits_b)
    n_a = circuits_a[0].pauli.n
    n_b = circuits_b[0].pauli.n
    if c.qubits != n_a + n_b:
        raise DimensionError(f"operator on {c.qubits} qubits, parties have {n_a}+{n_b}")
    sa, sb = _states(circuits_a), _states(circuits_b)
    dim = sa.shape[1] * sb.shape[1]
    out = np.zeros((dim, dim), dtype=complex)
    for coef, p in c.terms:
        pa, pb = p.split(n_a)
        z = np.kron(_sandwich(sa, pa), _sandwich(sb, pb))
        out += coef * estimate(z, cfg, "D", p.label)
    return hermitize(out)
