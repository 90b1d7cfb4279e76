import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


def random_state(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(dim, rng, rank=None):
    rank = rank or dim
    a = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def partial_trace_loop_a(c, rho, da, db):
    """Index-loop oracle for Tr_A[(rho (x) 1) C]."""
    out = np.zeros((db, db), dtype=complex)
    for b1 in range(db):
        for b2 in range(db):
            s = 0
            for a1 in range(da):
                for a2 in range(da):
                    s += rho[a2, a1] * c[a1 * db + b1, a2 * db + b2]
            out[b1, b2] = s
    return out


def partial_trace_loop_b(c, sigma, da, db):
    out = np.zeros((da, da), dtype=complex)
    for a1 in range(da):
        for a2 in range(da):
            s = 0
            for b1 in range(db):
                for b2 in range(db):
                    s += sigma[b2, b1] * c[a1 * db + b1, a2 * db + b2]
            out[a1, a2] = s
    return out
