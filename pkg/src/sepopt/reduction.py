"""
Reduced separability problems over an ansatz span, and lifting back.

With ansatz matrices ``Psi`` (party A, columns ``psi_i``) and ``Phi`` (party
B), a full-space operator ``C`` becomes ``D = (Psi (x) Phi)^* C (Psi (x) Phi)``.
For the trace-one (state) problem the Gram matrices are whitened away, giving
``D~ = (W_A (x) W_B)^* D (W_A (x) W_B)`` with ``W = G^{-1/2}``; any product
state of the whitened problem maps to a product state of the original one
with the same objective value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSet
from .coprocessor import EXACT, BackendConfig, PreparationCircuit, assemble_d, assemble_gram, assemble_kron_blocks, prepare
from .errors import DegenerateGramError, DimensionError
from .numerics import GRAM_CUTOFF, PsdInvSqrt, inv_sqrt_psd, top_eigvec
from .operators import KronOperator, PauliString, PauliSum, hermitize


def _matrix(ansatz) -> np.ndarray:
    return ansatz.states if isinstance(ansatz, AnsatzSet) else np.asarray(ansatz)


@dataclass
class ConstraintSet:
    """Affine constraints ``<A_i, X> = b_i`` with Hermitian ``A_i``."""

    items: list = field(default_factory=list)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def residuals(self, x: np.ndarray) -> np.ndarray:
        return np.array([np.vdot(a, x).real - b for a, b in self.items])


def reduce_general(c: np.ndarray, constraints: ConstraintSet, ansatz_a, ansatz_b):
    """Transform a constrained separable-cone problem onto the ansatz span.

    Returns ``(D, constraints')`` with ``D = (Psi (x) Phi)^* C (Psi (x) Phi)``
    and every constraint operator mapped by the same congruence. The map is
    an inner approximation: any separable ``Y`` feasible for the reduced
    problem lifts to the feasible ``X = (Psi (x) Phi) Y (Psi (x) Phi)^*`` with
    equal objective. The converse fails in general, and the reduced problem
    can be infeasible when the original is not; no repair is attempted.
    """
    psi, phi = _matrix(ansatz_a), _matrix(ansatz_b)
    t = np.kron(psi, phi)
    c = np.asarray(c)
    if c.shape != (t.shape[0], t.shape[0]):
        raise DimensionError(f"operator {c.shape} vs ansatz space of dim {t.shape[0]}")
    d = hermitize(t.conj().T @ c @ t)
    mapped = ConstraintSet([(hermitize(t.conj().T @ np.asarray(a) @ t), b) for a, b in constraints])
    return d, mapped


def lift_operator(y: np.ndarray, ansatz_a, ansatz_b) -> np.ndarray:
    """``X = (Psi (x) Phi) Y (Psi (x) Phi)^*``."""
    t = np.kron(_matrix(ansatz_a), _matrix(ansatz_b))
    return t @ y @ t.conj().T


@dataclass(eq=False)
class ReducedProblem:
    """Whitened reduced state problem.

    Exactly one of ``objective`` (dense ``D~``) and ``pairs`` (``(c, K~, L~)``)
    is required; :meth:`dense_objective` and :meth:`kron_operator` convert.
    ``operator`` is the original full-space operator, kept so lifted states
    can be re-evaluated exactly.
    """

    ansatz_a: AnsatzSet
    ansatz_b: AnsatzSet
    gram_a: np.ndarray
    gram_b: np.ndarray
    whiten_a: PsdInvSqrt
    whiten_b: PsdInvSqrt
    operator: object
    objective: np.ndarray | None = None
    pairs: list | None = None
    raw: np.ndarray | None = None

    @property
    def dims(self) -> tuple[int, int]:
        return self.whiten_a.whitener.shape[1], self.whiten_b.whitener.shape[1]

    def dense_objective(self) -> np.ndarray:
        if self.objective is None:
            self.objective = hermitize(sum(c * np.kron(k, l) for c, k, l in self.pairs))
        return self.objective

    def kron_operator(self) -> KronOperator:
        ra, rb = self.dims
        if self.pairs is None:
            raise ValueError("problem has no Kronecker structure")
        return KronOperator(ra, rb, self.pairs)

    def value(self, rho: np.ndarray, sigma: np.ndarray) -> float:
        """Reduced objective ``<rho (x) sigma, D~>``."""
        if self.pairs is not None:
            return float(sum(c * np.vdot(rho, k).real * np.vdot(sigma, l).real for c, k, l in self.pairs))
        return float(np.vdot(np.kron(rho, sigma), self.dense_objective()).real)

    def to_json(self) -> dict:
        def cm(a):
            a = np.asarray(a)
            return {"re": a.real.tolist(), "im": a.imag.tolist()}

        def ans(a):
            return {"reference": cm(a.reference), "paulis": [p.label for p in a.strings],
                    "order": a.order, "requested": a.requested}

        out = {"dims": list(self.dims), "gramA": cm(self.gram_a), "gramB": cm(self.gram_b),
               "ansatzA": ans(self.ansatz_a), "ansatzB": ans(self.ansatz_b)}
        d = self.dense_objective()
        out["D_re"], out["D_im"] = d.real.tolist(), d.imag.tolist()
        if self.pairs is not None:
            out["pairs"] = [{"c": c, "K": cm(k), "L": cm(l)} for c, k, l in self.pairs]
        return out

    @classmethod
    def from_json(cls, obj: dict, operator=None, cutoff: float = GRAM_CUTOFF) -> "ReducedProblem":
        def arr(o):
            return np.asarray(o["re"]) + 1j * np.asarray(o["im"])

        def ans(o, party):
            ref = arr(o["reference"])
            preps = [PreparationCircuit(ref, PauliString.from_label(s)) for s in o["paulis"]]
            states = np.stack([prepare(p) for p in preps], axis=1)
            return AnsatzSet(party, ref, preps, states, o["order"], o["requested"])

        ga, gb = arr(obj["gramA"]), arr(obj["gramB"])
        pairs = None
        if "pairs" in obj:
            pairs = [(p["c"], arr(p["K"]), arr(p["L"])) for p in obj["pairs"]]
        return cls(ans(obj["ansatzA"], "A"), ans(obj["ansatzB"], "B"), ga, gb,
                   inv_sqrt_psd(ga, cutoff, "A"), inv_sqrt_psd(gb, cutoff, "B"), operator,
                   objective=np.asarray(obj["D_re"]) + 1j * np.asarray(obj["D_im"]), pairs=pairs)


def _circuits(a: AnsatzSet):
    return a.preparations


def _whiten(g, cutoff, party):
    return inv_sqrt_psd(g, cutoff, party)


def build_reduced_state_problem(c, ansatz_a: AnsatzSet, ansatz_b: AnsatzSet,
                                cfg: BackendConfig = EXACT, cutoff: float = GRAM_CUTOFF) -> ReducedProblem:
    """Whitened reduced problem ``max <Z, D~>`` over ``SepD(C^L : C^M)``.

    ``c`` may be a :class:`PauliSum` (data read out on the co-processor, any
    backend mode), a :class:`KronOperator` with Pauli-sum factors, or a dense
    array (classical congruence, exact mode only).
    """
    ga = assemble_gram(_circuits(ansatz_a), cfg, "A")
    gb = assemble_gram(_circuits(ansatz_b), cfg, "B")
    if isinstance(c, PauliSum):
        d = assemble_d(_circuits(ansatz_a), _circuits(ansatz_b), c, cfg)
    elif isinstance(c, KronOperator):
        d = _kron_raw(c, ansatz_a, ansatz_b, cfg)
        d = hermitize(sum(coef * np.kron(k, l) for coef, k, l in d))
    else:
        if not cfg.exact:
            raise ValueError("sampled readout needs a Pauli decomposition of the operator")
        d, _ = reduce_general(c, ConstraintSet(), ansatz_a, ansatz_b)
    wa, wb = _whiten(ga, cutoff, "A"), _whiten(gb, cutoff, "B")
    t = np.kron(wa.whitener, wb.whitener)
    dt = hermitize(t.conj().T @ d @ t)
    return ReducedProblem(ansatz_a, ansatz_b, ga, gb, wa, wb, c, objective=dt, raw=d)


def _factor_blocks(factors, ansatz: AnsatzSet, cfg, party):
    """Unwhitened blocks ``Psi^* F Psi`` for each distinct factor."""
    out = []
    cache: list[tuple[object, np.ndarray]] = []
    for f in factors:
        hit = next((b for g, b in cache if g is f or (isinstance(g, PauliSum) and g == f)), None)
        if hit is None:
            if isinstance(f, PauliSum):
                hit = assemble_kron_blocks(_circuits(ansatz), [f], cfg, party)[0]
            else:
                if not cfg.exact:
                    raise ValueError("sampled readout needs Pauli-sum factors")
                s = ansatz.states
                hit = hermitize(s.conj().T @ np.asarray(f) @ s)
            cache.append((f, hit))
        out.append(hit)
    return out


def _kron_raw(op: KronOperator, ansatz_a, ansatz_b, cfg):
    ks = _factor_blocks([k for _, k, _ in op.pairs], ansatz_a, cfg, "A")
    ls = _factor_blocks([l for _, _, l in op.pairs], ansatz_b, cfg, "B")
    return [(c, k, l) for (c, _, _), k, l in zip(op.pairs, ks, ls)]


def build_reduced_kron_problem(op: KronOperator, ansatz_a: AnsatzSet, ansatz_b: AnsatzSet,
                               cfg: BackendConfig = EXACT, cutoff: float = GRAM_CUTOFF) -> ReducedProblem:
    """Structured reduced problem with ``K~_m = W_A^* (Psi^* K_m Psi) W_A`` and likewise ``L~_m``."""
    if op.dim_a != ansatz_a.states.shape[0] or op.dim_b != ansatz_b.states.shape[0]:
        raise DimensionError("operator and ansatz dimensions differ")
    ga = assemble_gram(_circuits(ansatz_a), cfg, "A")
    gb = assemble_gram(_circuits(ansatz_b), cfg, "B")
    wa, wb = _whiten(ga, cutoff, "A"), _whiten(gb, cutoff, "B")
    raw = _kron_raw(op, ansatz_a, ansatz_b, cfg)
    pairs = []
    for c, k, l in raw:
        kt = hermitize(wa.whitener.conj().T @ k @ wa.whitener)
        lt = hermitize(wb.whitener.conj().T @ l @ wb.whitener)
        pairs.append((c, kt, lt))
    return ReducedProblem(ansatz_a, ansatz_b, ga, gb, wa, wb, op, pairs=pairs)


@dataclass
class LiftedSolution:
    """A full-space product state ``u (x) v`` obtained from a reduced solution.

    ``coeffs_a``/``coeffs_b`` are the ansatz coefficients (``u = Psi coeffs_a``),
    ``value`` the exact objective of ``u (x) v`` for the original operator and
    ``reduced_value`` the reduced objective of the state that was lifted.
    """

    coeffs_a: np.ndarray
    coeffs_b: np.ndarray
    state_a: np.ndarray
    state_b: np.ndarray
    value: float
    reduced_value: float

    @property
    def gap(self) -> float:
        return abs(self.reduced_value - self.value)


def _as_pure(x, what):
    x = np.asarray(x)
    if x.ndim == 1:
        return x / np.linalg.norm(x)
    w = np.linalg.eigvalsh(hermitize(x))
    if w[-2:].size == 2 and w[-2] > 1e-8:
        raise ValueError(f"{what} is not a pure state")
    return top_eigvec(x)[1]


def exact_product_value(operator, u: np.ndarray, v: np.ndarray) -> float:
    """``<u (x) v| C |u (x) v>`` without forming ``u (x) v`` where possible."""
    if isinstance(operator, PauliSum):
        n_a = int(np.log2(u.size))
        return operator.product_expectation(u, v, n_a)
    if isinstance(operator, KronOperator):
        return operator.product_expectation(u, v)
    w = np.kron(u, v)
    return float(np.vdot(w, np.asarray(operator) @ w).real)


def lift(problem: ReducedProblem, rho, sigma) -> LiftedSolution:
    """Map a reduced product state to a normalized full-space product state.

    ``rho``/``sigma`` are pure states in whitened coordinates (vectors or
    rank-1 density matrices). The reported ``value`` is recomputed on the lifted
    states themselves, so it is the objective of a genuinely feasible point
    even when the reduced data were estimated with shot noise.
    """
    za, zb = _as_pure(rho, "rho"), _as_pure(sigma, "sigma")
    reduced_value = problem.value(np.outer(za, za.conj()), np.outer(zb, zb.conj()))
    out = []
    for z, w, ans, party in ((za, problem.whiten_a, problem.ansatz_a, "A"),
                             (zb, problem.whiten_b, problem.ansatz_b, "B")):
        coeffs = w.whitener @ z
        u = ans.states @ coeffs
        norm = np.linalg.norm(u)
        if norm < 1e-12:
            raise DegenerateGramError(f"lifted state of party {party} has zero norm", party=party)
        out.append((coeffs / norm, u / norm))
    (ca, ua), (cb, ub) = out
    value = exact_product_value(problem.operator, ua, ub)
    return LiftedSolution(ca, cb, ua, ub, value, reduced_value)


def _is_prefix(small: AnsatzSet, large: AnsatzSet) -> bool:
    if small.size > large.size:
        return False
    if not np.allclose(small.reference, large.reference, atol=1e-14):
        return False
    return small.strings == large.strings[: small.size]


def embed_warm_start(small: ReducedProblem, large: ReducedProblem, solution: LiftedSolution):
    """Express a lifted solution of ``small`` as a product state of ``large``.

    Requires the ansatz sets of ``small`` to be prefixes of those of ``large``.
    Returns ``(rho, sigma)`` rank-1 density matrices in the whitened coordinates
    of ``large``; in exact mode its objective equals ``solution.value``.
    """
    if not (_is_prefix(small.ansatz_a, large.ansatz_a) and _is_prefix(small.ansatz_b, large.ansatz_b)):
        raise ValueError("ansatz sets are not nested")
    states = []
    for coeffs, w, g in ((solution.coeffs_a, large.whiten_a, large.gram_a),
                         (solution.coeffs_b, large.whiten_b, large.gram_b)):
        c = np.zeros(g.shape[0], dtype=complex)
        c[: coeffs.size] = coeffs
        # W^* G W = 1 on the kept space, so z = W^* G c inverts c = W z
        z = w.whitener.conj().T @ (g @ c)
        norm = np.linalg.norm(z)
        if norm < 1e-12:
            raise DegenerateGramError("warm start vanishes in the larger problem")
        z = z / norm
        states.append(np.outer(z, z.conj()))
    return states[0], states[1]


def reference_start(problem: ReducedProblem) -> np.ndarray:
    """Whitened coordinates of the bare reference on party A, as a density matrix."""
    g, w = problem.gram_a, problem.whiten_a
    e0 = np.zeros(g.shape[0], dtype=complex)
    e0[0] = 1.0
    z = w.whitener.conj().T @ (g @ e0)
    z = z / np.linalg.norm(z)
    return np.outer(z, z.conj())


def dumps(problem: ReducedProblem) -> str:
    return json.dumps(problem.to_json())
