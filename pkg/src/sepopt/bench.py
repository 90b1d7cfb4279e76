"""Timing harness for the see-saw inner loop."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .numerics import top_eigvec
from .operators import KronOperator, contract_a, contract_b, kron_contract
from .seesaw import SeesawConfig, seesaw_dense, seesaw_kron


@dataclass
class BenchRow:
    path: str
    dim: int
    terms: int
    iter_time: float
    total_time: float


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_kron(dim: int, pairs: int, seed: int = 0) -> KronOperator:
    rng = np.random.default_rng(seed)
    return KronOperator(dim, dim, [(rng.standard_normal(), random_hermitian(dim, rng), random_hermitian(dim, rng))
                                   for _ in range(pairs)])


def sweep_times(to_b, to_a, dim_a: int, sweeps: int) -> np.ndarray:
    """Wall time of each full sweep (both half-steps), starting from the mixed state."""
    rho = np.eye(dim_a, dtype=complex) / dim_a
    out = np.empty(sweeps)
    for i in range(sweeps):
        t0 = time.perf_counter()
        _, v = top_eigvec(to_b(rho))
        _, u = top_eigvec(to_a(np.outer(v, v.conj())))
        rho = np.outer(u, u.conj())
        out[i] = time.perf_counter() - t0
    return out


def bench_structured(dim: int, pairs: int = 10, sweeps: int = 20, seed: int = 0,
                     cfg: SeesawConfig = SeesawConfig(max_iters=200)) -> BenchRow:
    op = random_kron(dim, pairs, seed).densified()
    op.stacks()
    times = sweep_times(lambda r: kron_contract(op, "A", r), lambda s: kron_contract(op, "B", s), dim, sweeps)
    t0 = time.perf_counter()
    seesaw_kron(op, cfg)
    return BenchRow("structured", dim, pairs, float(np.median(times)), time.perf_counter() - t0)


def bench_dense(dim: int, sweeps: int = 20, seed: int = 0,
                cfg: SeesawConfig = SeesawConfig(max_iters=200)) -> BenchRow:
    c = random_hermitian(dim * dim, np.random.default_rng(seed))
    times = sweep_times(lambda r: contract_a(c, r), lambda s: contract_b(c, s), dim, sweeps)
    t0 = time.perf_counter()
    seesaw_dense(c, dim, dim, cfg)
    return BenchRow("dense", dim, 1, float(np.median(times)), time.perf_counter() - t0)
