"""
Hermitian eigen-solvers and PSD matrix functions.

Dense routines wrap :func:`numpy.linalg.eigh`; :func:`lanczos_extremal` is a
matrix-free Lanczos iteration with full reorthogonalization for operators too
large to materialize. Gram matrices are plain Hermitian arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DegenerateGramError, DimensionError
from .operators import PauliSum, hermitian_error, hermitize

GRAM_CUTOFF = 1e-8


class EigResult(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def eigh(a: np.ndarray, tol: float = 1e-10) -> EigResult:
    """Full spectrum of a Hermitian matrix, ascending.

    Raises ``ValueError`` if ``a`` is not Hermitian to relative tolerance ``tol``.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    if hermitian_error(a) > tol:
        raise ValueError(f"matrix is not Hermitian (relative error {hermitian_error(a):.2e})")
    w, v = np.linalg.eigh(hermitize(a))
    return EigResult(w, v)


def _fix_phase(v):
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    v[k] = abs(v[k])
    return v


def top_eigvec(a: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector for it.

    Among (numerically) degenerate top eigenvalues the lowest index returned
    by ``eigh`` wins, and the global phase is fixed so the largest-magnitude
    component is real positive; the result is therefore deterministic.
    """
    w, v = np.linalg.eigh(hermitize(np.asarray(a)))
    top = w[-1]
    k = int(np.argmax(w >= top - 1e-12 * max(1.0, abs(top))))
    return float(top), _fix_phase(v[:, k])


def principal_eigvec(a: np.ndarray) -> tuple[float, np.ndarray]:
    """``(lambda_max, |v><v|)`` where ``v`` is a principal unit eigenvector."""
    value, vec = top_eigvec(a)
    return value, np.outer(vec, vec.conj())


def _as_linear_map(op, dim):
    if isinstance(op, PauliSum):
        return op.matvec, op.dim, op.is_real()
    if isinstance(op, np.ndarray):
        if op.shape != (op.shape[0], op.shape[0]):
            raise DimensionError(f"expected a square matrix, got {op.shape}")
        return (lambda v: op @ v), op.shape[0], not np.iscomplexobj(op)
    if dim is None:
        raise ValueError("dim is required for a callable operator")
    return op, int(dim), False


def lanczos_extremal(op, dim: int | None = None, which: str = "max", iters: int = 200,
                     tol: float = 1e-8, seed=0, max_restarts: int = 20,
                     memory_bytes: float = 1e9) -> float:
    """Extremal eigenvalue of a self-adjoint operator by restarted Lanczos.

    Parameters
    ----------
    op : PauliSum, ndarray or callable
        The operator. A callable must map a vector of length ``dim`` to its image.
    dim : int, optional
        Required for callables.
    which : {"max", "min"}
    iters : int
        Krylov basis size per cycle (also limited by ``memory_bytes``).
    tol : float
        Convergence when the Ritz residual is below ``tol * max(1, |theta|)``.
    seed : int
        Seed of the random start vector.
    max_restarts : int
        Restart cycles, each seeded with the current best Ritz vector. A
        stagnating cycle gets a fresh random component mixed in.

    Raises
    ------
    ConvergenceError
        Carrying the best estimate when ``max_restarts`` is exhausted.
    """
    matvec, n, real = _as_linear_map(op, dim)
    if which not in ("max", "min"):
        raise ValueError("which must be 'max' or 'min'")
    sign = 1.0 if which == "max" else -1.0
    dtype = np.float64 if real else np.complex128
    itemsize = np.dtype(dtype).itemsize
    m = int(max(2, min(iters, n, memory_bytes // (itemsize * n))))
    rng = np.random.default_rng(seed)

    def rand_vec():
        v = rng.standard_normal(n)
        if not real:
            v = v + 1j * rng.standard_normal(n)
        return v / np.linalg.norm(v)

    if n == 1:
        e = np.zeros(1, dtype=dtype)
        e[0] = 1
        return float(np.real(np.vdot(e, matvec(e))))

    v = rand_vec()
    best = -np.inf
    prev = None
    basis = np.empty((m + 1, n), dtype=dtype)
    for _ in range(max_restarts + 1):
        basis[0] = v
        alphas, betas = [], []
        theta = s = None
        for j in range(m):
            w = sign * np.asarray(matvec(basis[j]))
            if real:
                w = w.real
            alphas.append(float(np.real(np.vdot(basis[j], w))))
            # full reorthogonalization, twice is enough
            for _pass in range(2):
                w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
            beta = float(np.linalg.norm(w))
            t = np.diag(alphas) + np.diag(betas, 1) + np.diag(betas, -1)
            tw, tv = np.linalg.eigh(t)
            theta, s = tw[-1], tv[:, -1]
            best = max(best, theta)
            resid = beta * abs(s[-1])
            if resid <= tol * max(1.0, abs(theta)) or beta < 1e-14 * max(1.0, abs(theta)):
                return float(sign * theta)
            if j + 1 < m:
                betas.append(beta)
                basis[j + 1] = w / beta
        v = s @ basis[: len(s)]
        if prev is not None and abs(theta - prev) <= 1e-14 * max(1.0, abs(theta)):
            v = v + 1e-3 * rand_vec()
        prev = theta
        v = v / np.linalg.norm(v)
    raise ConvergenceError("Lanczos did not converge", best=float(sign * best))


def project_psd(g: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: Hermitize then clip negative eigenvalues."""
    w, v = np.linalg.eigh(hermitize(np.asarray(g)))
    w = np.clip(w, 0.0, None)
    return (v * w) @ v.conj().T


@dataclass(frozen=True)
class PsdInvSqrt:
    """Inverse square root of a PSD matrix restricted to its kept eigenspace.

    ``matrix`` is the Hermitian pseudo-inverse square root (``L x L``).
    ``whitener`` maps whitened coordinates back to the original basis: it is
    ``matrix`` itself when nothing was dropped, otherwise the ``L x r`` matrix
    ``V_k diag(lambda_k ** -1/2)``.
    """

    matrix: np.ndarray
    whitener: np.ndarray
    eigenvalues: np.ndarray
    kept: int
    dropped: int


def inv_sqrt_psd(g: np.ndarray, cutoff: float = GRAM_CUTOFF, party: str | None = None) -> PsdInvSqrt:
    """``G^{-1/2}`` on the eigenspace with eigenvalues above ``cutoff * lambda_max(G)``.

    ``G`` is Hermitized first; negative eigenvalues (from sampling noise) fall
    below the cutoff and are dropped along with near-null directions.
    """
    g = np.asarray(g)
    w, v = np.linalg.eigh(hermitize(g))
    top = w[-1] if w.size else 0.0
    if top <= 0:
        raise DegenerateGramError(f"Gram matrix{' of party ' + party if party else ''} has no positive eigenvalue",
                                  party=party)
    keep = w > cutoff * top
    if not keep.any():
        raise DegenerateGramError(f"no Gram eigenvalue{' of party ' + party if party else ''} above the cutoff",
                                  party=party)
    vk = v[:, keep]
    inv = 1.0 / np.sqrt(w[keep])
    mat = (vk * inv) @ vk.conj().T
    dropped = int((~keep).sum())
    whitener = mat if dropped == 0 else vk * inv
    return PsdInvSqrt(mat, whitener, w, int(keep.sum()), dropped)


def ansatz_extremal_energy(d: np.ndarray, g: np.ndarray, which: str = "max",
                           cutoff: float = GRAM_CUTOFF, return_coords: bool = False):
    """Extremal value of ``D chi = lambda G chi`` over the ansatz span.

    ``D[i, j] = <psi_i|H|psi_j>`` and ``G[i, j] = <psi_i|psi_j>``. The problem is
    whitened with :func:`inv_sqrt_psd` and solved densely. With
    ``return_coords`` the ansatz coefficients ``chi`` of the extremal
    combination (normalized so that ``chi^* G chi = 1``) are returned as well.
    """
    d = np.asarray(d)
    if d.shape != np.shape(g):
        raise DimensionError(f"D {d.shape} and G {np.shape(g)} differ")
    w = inv_sqrt_psd(g, cutoff).whitener
    m = hermitize(w.conj().T @ d @ w)
    vals, vecs = np.linalg.eigh(m)
    k = -1 if which == "max" else 0
    if which not in ("max", "min"):
        raise ValueError("which must be 'max' or 'min'")
    if return_coords:
        return float(vals[k]), w @ vecs[:, k]
    return float(vals[k])

