"""
Separable ground energies and ground-space entanglement of Ising chains.

The chain is ``H = -sum_n [J Z_n Z_{n+1} + g Z_n + h X_n]`` with periodic
boundary (site ``N + 1`` is site 1). Energies are maximized, so the "ground"
energy is ``lambda_max``. Party A holds qubits ``1..N_A``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSet, build_ansatz, reference_state
from .coprocessor import EXACT, BackendConfig
from .errors import UndefinedMeasureError
from .numerics import GRAM_CUTOFF, ansatz_extremal_energy, lanczos_extremal
from .operators import DENSE_CAP, KronOperator, PauliString, PauliSum, projector
from .reduction import (LiftedSolution, ReducedProblem, build_reduced_kron_problem, embed_warm_start,
                        exact_product_value, lift, reference_start)
from .seesaw import BEST_OF_ALL, SeesawConfig, SeesawResult, seesaw_dense, seesaw_kron

DEFAULT_RAM_CAP = 8 * 2**30


@dataclass(frozen=True)
class IsingParams:
    n: int
    j: float = 1.0
    g: float = 0.0
    h: float = 0.0
    n_a: int | None = None

    def __post_init__(self):
        if self.n_a is None:
            object.__setattr__(self, "n_a", self.n // 2)
        if not 1 <= self.n_a < self.n:
            raise ValueError(f"need 1 <= n_a < n, got n_a={self.n_a}, n={self.n}")

    @property
    def n_b(self) -> int:
        return self.n - self.n_a

    def with_h(self, h: float) -> "IsingParams":
        return IsingParams(self.n, self.j, self.g, h, self.n_a)


def _z(n, *qubits):
    label = ["I"] * n
    for q in qubits:
        label[q - 1] = "Z"
    return PauliString.from_label("".join(label))


def build_ising(p: IsingParams) -> PauliSum:
    terms = []
    for k in range(1, p.n + 1):
        nxt = k % p.n + 1
        terms.append((-p.j, _z(p.n, k, nxt) if nxt != k else PauliString.identity(p.n)))
        terms.append((-p.g, _z(p.n, k)))
        terms.append((-p.h, PauliString.single(p.n, k, "X")))
    return PauliSum(p.n, terms)


def _chain_zz(n):
    return PauliSum(n, [(-1.0, _z(n, k, k + 1)) for k in range(1, n)])


def _field(n, symbol):
    return PauliSum(n, [(-1.0, PauliString.single(n, k, symbol)) for k in range(1, n + 1)])


def split_ising_kron(p: IsingParams) -> KronOperator:
    """The chain as ``sum c K (x) L`` across the cut after qubit ``N_A``.

    Pairs: ``(J, H_A^zz, 1)``, ``(J, 1, H_B^zz)``, the two bonds crossing the
    cut ``(-J, Z_{N_A}, Z_{N_A+1})`` and ``(-J, Z_1, Z_N)``, then the ``g`` and
    ``h`` field pairs. ``H^zz``, ``H^z``, ``H^x`` carry their minus signs;
    vanishing pairs are dropped.
    """
    na, nb = p.n_a, p.n_b
    ia, ib = PauliSum.identity(na), PauliSum.identity(nb)
    za_last = PauliSum(na, [(1.0, PauliString.single(na, na, "Z"))])
    za_first = PauliSum(na, [(1.0, PauliString.single(na, 1, "Z"))])
    zb_first = PauliSum(nb, [(1.0, PauliString.single(nb, 1, "Z"))])
    zb_last = PauliSum(nb, [(1.0, PauliString.single(nb, nb, "Z"))])
    pairs = [
        (p.j, _chain_zz(na), ib), (p.j, ia, _chain_zz(nb)),
        (-p.j, za_last, zb_first), (-p.j, za_first, zb_last),
        (p.g, _field(na, "Z"), ib), (p.g, ia, _field(nb, "Z")),
        (p.h, _field(na, "X"), ib), (p.h, ia, _field(nb, "X")),
    ]
    pairs = [(c, k, l) for c, k, l in pairs if c != 0 and len(k) and len(l)]
    return KronOperator(1 << na, 1 << nb, pairs)


def ising_party_generators(n: int) -> PauliSum:
    """Ising term strings acting only inside an ``n``-qubit party.

    Order: single ``Z``, neighbouring ``ZZ``, single ``X``. Coefficients are 1;
    only the strings matter for ansatz generation.
    """
    terms = [(1.0, PauliString.single(n, k, "Z")) for k in range(1, n + 1)]
    terms += [(1.0, _z(n, k, k + 1)) for k in range(1, n)]
    terms += [(1.0, PauliString.single(n, k, "X")) for k in range(1, n + 1)]
    return PauliSum(n, terms)


# ---------------------------------------------------------------------------
# separable ground energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnsatzSettings:
    size: int
    size_b: int | None = None
    order: int | str = "auto"
    reference: str = "random"
    seed: int = 0
    cutoff: float = GRAM_CUTOFF


@dataclass
class SeparableEnergy:
    """``alpha`` is the exact energy of the returned product state."""

    alpha: float
    method: str
    seesaw: SeesawResult
    state_a: np.ndarray
    state_b: np.ndarray
    lifted: LiftedSolution | None = None
    problem: ReducedProblem | None = None
    reference_energy: float | None = None


def party_ansatz(p: IsingParams, settings: AnsatzSettings) -> tuple[AnsatzSet, AnsatzSet]:
    seeds = np.random.SeedSequence(settings.seed).spawn(2)
    out = []
    for party, nq, size, s in (("A", p.n_a, settings.size, seeds[0]),
                               ("B", p.n_b, settings.size_b or settings.size, seeds[1])):
        ref = reference_state(settings.reference, nq, s)
        out.append(build_ansatz(ising_party_generators(nq), ref, settings.order,
                                min(size, 1 << nq), settings.cutoff, party))
    return out[0], out[1]


def solve_reduced(problem: ReducedProblem, cfg: SeesawConfig, initial=()) -> SeparableEnergy:
    """See-saw on a reduced problem, then lift. A start at the reference state is always included."""
    starts = [reference_start(problem), *initial]
    res = seesaw_kron(problem.kron_operator(), cfg, initial=starts)
    lifted = lift(problem, res.vec_a, res.vec_b)
    ref_e = exact_product_value(problem.operator, problem.ansatz_a.states[:, 0], problem.ansatz_b.states[:, 0])
    return SeparableEnergy(lifted.value, "reduced", res, lifted.state_a, lifted.state_b, lifted,
                           problem, ref_e)


def separable_ground_energy(p: IsingParams, method: str = "direct", ansatz: AnsatzSettings | None = None,
                            backend: BackendConfig = EXACT, cfg: SeesawConfig = BEST_OF_ALL,
                            dense_cap: int = DENSE_CAP) -> SeparableEnergy:
    """Lower bound on the separable ground energy and a product state attaining it.

    ``method="direct"`` runs the structured see-saw on the full party spaces;
    ``method="reduced"`` builds Krylov ansatz sets per party, reduces on the
    (simulated) co-processor, solves, and lifts. The returned ``alpha`` is the
    exact energy of the lifted product state either way.
    """
    op = split_ising_kron(p)
    if method == "direct":
        if max(op.dim_a, op.dim_b) > dense_cap:
            from .errors import ResourceError
            raise ResourceError("party dimension exceeds the dense cap; use method='reduced'")
        res = seesaw_kron(op, cfg)
        return SeparableEnergy(res.value, "direct", res, res.vec_a, res.vec_b)
    if method != "reduced":
        raise ValueError(f"unknown method {method!r}")
    if ansatz is None:
        raise ValueError("the reduced method needs ansatz settings")
    aa, ab = party_ansatz(p, ansatz)
    problem = build_reduced_kron_problem(op, aa, ab, backend, ansatz.cutoff)
    return solve_reduced(problem, cfg)


# ---------------------------------------------------------------------------
# entanglement measure
# ---------------------------------------------------------------------------

@dataclass
class EntanglementReport:
    alpha_hat: float
    lambda_max: float
    lambda_min: float
    delta_hat: float
    eig_exact: bool
    flags: dict = field(default_factory=dict)

    @property
    def flag_string(self) -> str:
        return ";".join(f"{k}={v}" for k, v in sorted(self.flags.items()))


def delta_hat(lambda_max: float, lambda_min: float, alpha: float) -> float:
    """``(lambda_max - alpha) / (lambda_max - lambda_min)``."""
    spread = lambda_max - lambda_min
    if abs(spread) <= 1e-12 * max(1.0, abs(lambda_max)):
        raise UndefinedMeasureError("lambda_max == lambda_min: Hamiltonian is proportional to the identity")
    return (lambda_max - alpha) / spread


def special_hamiltonian(eps: float) -> np.ndarray:
    """``(1 - eps)|00><00| + |psi-><psi-|`` on two qubits."""
    psi_minus = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    return (1 - eps) * projector([1, 0, 0, 0]) + projector(psi_minus)


def entanglement_report(h: np.ndarray, dim_a: int, dim_b: int, cfg: SeesawConfig = BEST_OF_ALL) -> EntanglementReport:
    """Ground-space entanglement of a small dense Hamiltonian (exact spectrum)."""
    w = np.linalg.eigvalsh(np.asarray(h))
    res = seesaw_dense(h, dim_a, dim_b, cfg)
    return EntanglementReport(res.value, float(w[-1]), float(w[0]),
                              delta_hat(float(w[-1]), float(w[0]), res.value), True,
                              {"alpha": "seesaw", "eig": "exact"})


def exact_fits(n: int, ram_cap: float = DEFAULT_RAM_CAP) -> bool:
    """2^n complex amplitudes times four work vectors within ``ram_cap`` bytes."""
    return (1 << n) * 16 * 4 <= ram_cap


def ansatz_spectrum(p: IsingParams, settings: AnsatzSettings, backend: BackendConfig = EXACT) -> tuple[float, float]:
    """``(lambda_max, lambda_min)`` estimated on the product-ansatz span."""
    aa, ab = party_ansatz(p, settings)
    prob = build_reduced_kron_problem(split_ising_kron(p), aa, ab, backend, settings.cutoff)
    d = prob.dense_objective()
    g = np.eye(d.shape[0])
    return ansatz_extremal_energy(d, g, "max"), ansatz_extremal_energy(d, g, "min")


def entanglement_measure(p: IsingParams, cfg: SeesawConfig = BEST_OF_ALL, method: str | None = None,
                         ansatz: AnsatzSettings | None = None, ram_cap: float = DEFAULT_RAM_CAP,
                         lanczos_seed: int = 0) -> EntanglementReport:
    """``delta_hat`` for an Ising chain.

    The spectrum comes from Lanczos when the state vector fits ``ram_cap``
    (flag ``eig=exact``); otherwise both extremal values are estimated on the
    product-ansatz span (flag ``eig=estimate``). ``alpha_hat`` comes from
    :func:`separable_ground_energy`. By default it is direct when both parties
    have at most 10 qubits and the spectrum is exact. Otherwise it is reduced on
    the same ansatz, which keeps ``alpha_hat <= lambda_max`` for estimated
    spectra because every ansatz product state lies in the estimation span.
    """
    flags = {}
    if exact_fits(p.n, ram_cap):
        h = build_ising(p)
        lmax = lanczos_extremal(h, which="max", seed=lanczos_seed)
        lmin = lanczos_extremal(h, which="min", seed=lanczos_seed)
        exact = True
        flags["eig"] = "exact"
    else:
        if ansatz is None:
            raise ValueError("spectrum does not fit the RAM cap and no ansatz settings were given")
        lmax, lmin = ansatz_spectrum(p, ansatz)
        exact = False
        flags["eig"] = "estimate"
    if method is None:
        method = "direct" if exact and max(p.n_a, p.n_b) <= 10 else "reduced"
    sep = separable_ground_energy(p, method, ansatz, cfg=cfg)
    flags["alpha"] = method
    dh = delta_hat(lmax, lmin, sep.alpha)
    if exact and not -1e-9 <= dh <= 1 + 1e-9:
        warnings.warn(f"delta_hat={dh} outside [0, 1] with exact spectrum", RuntimeWarning, stacklevel=2)
    elif not exact and dh < -1e-9:
        warnings.warn(f"delta_hat={dh} is negative: alpha_hat exceeds the estimated lambda_max",
                      RuntimeWarning, stacklevel=2)
    return EntanglementReport(sep.alpha, lmax, lmin, dh, exact, flags)


def delta_scan(p: IsingParams, h_values, cfg: SeesawConfig = BEST_OF_ALL, **kwargs) -> list[tuple[float, EntanglementReport]]:
    return [(float(h), entanglement_measure(p.with_h(float(h)), cfg, **kwargs)) for h in h_values]


# ---------------------------------------------------------------------------
# ansatz-size sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepRow:
    size: int
    trial: int
    alpha: float
    ansatz_size_a: int
    ansatz_size_b: int


@dataclass
class SweepResult:
    alpha_direct: float | None
    rows: list[SweepRow]

    def by_size(self) -> dict[int, np.ndarray]:
        out: dict[int, list] = {}
        for r in self.rows:
            out.setdefault(r.size, []).append(r.alpha)
        return {k: np.array(v) for k, v in sorted(out.items())}

    def summary(self) -> list[dict]:
        rows = []
        for size, vals in self.by_size().items():
            rows.append({"L": size, "mean": float(vals.mean()), "max": float(vals.max()),
                         "median": float(np.median(vals))})
        return rows


def ansatz_sweep(p: IsingParams, sizes, trials: int = 10, seed: int = 0, backend: BackendConfig = EXACT,
                 cfg: SeesawConfig = SeesawConfig(init=("mixed", "uniform")), order="auto",
                 reference: str = "random", direct: bool = True, cutoff: float = GRAM_CUTOFF) -> SweepResult:
    """Reduced-method energies for growing ansatz sizes and random references.

    For each trial the largest ansatz is built once and the smaller ones are
    its prefixes, so every size warm-starts from the previous size's lifted
    solution; in exact mode the per-trial energies are then non-decreasing.
    """
    sizes = sorted(int(s) for s in sizes)
    op = split_ising_kron(p)
    alpha_direct = seesaw_kron(op, BEST_OF_ALL).value if direct else None
    rows = []
    for t in range(trials):
        settings = AnsatzSettings(max(sizes), order=order, reference=reference,
                                  seed=int(np.random.SeedSequence([seed, t]).generate_state(1)[0]),
                                  cutoff=cutoff)
        full_a, full_b = party_ansatz(p, settings)
        prev_problem = prev_sol = None
        for size in sizes:
            aa, ab = full_a.prefix(size), full_b.prefix(size)
            problem = build_reduced_kron_problem(op, aa, ab, backend, cutoff)
            initial = []
            if prev_sol is not None:
                initial.append(embed_warm_start(prev_problem, problem, prev_sol)[0])
            sol = solve_reduced(problem, cfg, initial)
            rows.append(SweepRow(size, t, sol.alpha, aa.size, ab.size))
            prev_problem, prev_sol = problem, sol.lifted
    return SweepResult(alpha_direct, rows)
