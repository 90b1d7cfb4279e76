"""
See-saw maximization of ``<rho (x) sigma, C>`` over product states.

Each half-step fixes one party and replaces the other by the principal
eigenvector of the contracted operator, which is the exact inner maximum.
The objective is therefore non-decreasing along the iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError
from .numerics import top_eigvec
from .operators import KronOperator, contract_a, contract_b, haar_state, kron_contract

INIT_KINDS = ("mixed", "uniform", "random")


@dataclass(frozen=True)
class SeesawConfig:
    """Initializations and stopping rule.

    ``init`` is one kind or a tuple of kinds from ``("mixed", "uniform",
    "random")``. ``restarts`` is the number of random starts (default 100);
    mixed and uniform starts are deterministic and run once. A run stops when
    the relative improvement of a full sweep, ``(v_t - v_{t-1}) / max(1, |v_t|)``,
    drops below ``rel_tol`` or after ``max_iters`` sweeps.
    """

    init: str | tuple[str, ...] = "mixed"
    restarts: int | None = None
    max_iters: int = 1000
    rel_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        kinds = (self.init,) if isinstance(self.init, str) else tuple(self.init)
        for k in kinds:
            if k not in INIT_KINDS:
                raise ValueError(f"unknown init kind {k!r}")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.restarts is not None and self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    @property
    def kinds(self) -> tuple[str, ...]:
        return (self.init,) if isinstance(self.init, str) else tuple(self.init)

    @property
    def random_restarts(self) -> int:
        return 100 if self.restarts is None else self.restarts


BEST_OF_ALL = SeesawConfig(init=("mixed", "uniform", "random"))


@dataclass
class RunRecord:
    init: str
    index: int
    value: float
    iterations: int
    converged: bool


@dataclass
class SeesawResult:
    """Best product state found.

    ``trace`` lists the objective after every half-step of the winning run;
    ``runs`` records every start that was tried.
    """

    rho: np.ndarray
    sigma: np.ndarray
    vec_a: np.ndarray
    vec_b: np.ndarray
    value: float
    trace: list[float]
    iterations: int
    converged: bool
    init: str
    restart_index: int
    runs: list[RunRecord] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": self.value, "iterations": self.iterations, "converged": self.converged,
                "init": self.init, "restart_index": self.restart_index, "trace": list(self.trace),
                "runs": [vars(r) for r in self.runs],
                "state_a": {"re": self.vec_a.real.tolist(), "im": self.vec_a.imag.tolist()},
                "state_b": {"re": self.vec_b.real.tolist(), "im": self.vec_b.imag.tolist()}}


def initial_state(kind: str, dim: int, seed=None) -> np.ndarray:
    """Starting density matrix: maximally mixed, uniform superposition, or Haar-random pure."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if kind == "mixed":
        return np.eye(dim, dtype=complex) / dim
    if kind == "uniform":
        return np.full((dim, dim), 1.0 / dim, dtype=complex)
    if kind == "random":
        v = haar_state(dim, seed)
        return np.outer(v, v.conj())
    raise ValueError(f"unknown init kind {kind!r}")


def _run(to_b: Callable, to_a: Callable, rho, max_iters, rel_tol):
    trace: list[float] = []
    prev = None
    converged = False
    it = 0
    u = v = None
    for it in range(1, max_iters + 1):
        val, v = top_eigvec(to_b(rho))
        trace.append(val)
        sigma = np.outer(v, v.conj())
        val, u = top_eigvec(to_a(sigma))
        trace.append(val)
        rho = np.outer(u, u.conj())
        if prev is not None and (val - prev) / max(1.0, abs(val)) < rel_tol:
            converged = True
            break
        prev = val
    return u, v, trace, it, converged


def _starts(cfg: SeesawConfig, dim_a: int, initial):
    starts = []
    for kind in cfg.kinds:
        if kind == "random":
            seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.random_restarts)
            starts += [("random", i, initial_state("random", dim_a, s)) for i, s in enumerate(seeds)]
        else:
            starts.append((kind, 0, initial_state(kind, dim_a)))
    for i, rho in enumerate(initial or ()):
        rho = np.asarray(rho)
        if rho.shape != (dim_a, dim_a):
            raise DimensionError(f"initial state of shape {rho.shape} for party A of dim {dim_a}")
        starts.append(("given", i, rho))
    return starts


def _solve(to_b, to_a, dim_a, cfg, initial) -> SeesawResult:
    best = None
    runs = []
    for kind, idx, rho0 in _starts(cfg, dim_a, initial):
        u, v, trace, its, conv = _run(to_b, to_a, rho0, cfg.max_iters, cfg.rel_tol)
        runs.append(RunRecord(kind, idx, trace[-1], its, conv))
        if best is None or trace[-1] > best.value:
            best = SeesawResult(np.outer(u, u.conj()), np.outer(v, v.conj()), u, v, trace[-1],
                                trace, its, conv, kind, idx)
    best.runs = runs
    return best


def seesaw_dense(c: np.ndarray, dim_a: int, dim_b: int, cfg: SeesawConfig = SeesawConfig(),
                 initial=None) -> SeesawResult:
    """See-saw on a dense operator of shape ``(dim_a * dim_b, dim_a * dim_b)``.

    ``initial`` is an optional list of extra starting states for party A.
    """
    c = np.asarray(c)
    if c.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionError(f"operator {c.shape} does not match {dim_a}x{dim_b}")
    return _solve(lambda rho: contract_a(c, rho), lambda sigma: contract_b(c, sigma), dim_a, cfg, initial)


def seesaw_kron(op: KronOperator, cfg: SeesawConfig = SeesawConfig(), initial=None) -> SeesawResult:
    """See-saw on ``sum_m c_m K_m (x) L_m`` touching only the ``d x d`` factors."""
    op = op.densified()
    return _solve(lambda rho: kron_contract(op, "A", rho), lambda sigma: kron_contract(op, "B", sigma),
                  op.dim_a, cfg, initial)
