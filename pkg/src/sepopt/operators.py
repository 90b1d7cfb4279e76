"""
Pauli algebra and Hermitian operator representations.

Three representations of a Hermitian operator are used throughout:

* plain ``numpy`` arrays (dense),
* :class:`PauliSum`, a real-weighted sum of Pauli strings applied matrix-free,
* :class:`KronOperator`, a list of ``(c, K, L)`` pairs meaning ``sum c K (x) L``.

Qubit convention: qubit 1 is the most significant bit of a basis index, so the
label ``"XZ"`` means ``X (x) Z`` with ``X`` on qubit 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError, ResourceError

DENSE_CAP = 2**14

# indexed by x_bit | (z_bit << 1)
_BY_BITS = "IXZY"
# (x bit, z bit) per symbol
_XZ = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def _popcount(v: int) -> int:
    return bin(v).count("1")


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliString:
    """A tensor product of single-qubit Paulis stored as X/Z bit masks.

    The operator is ``i**popcount(x & z) * X**x Z**z`` which makes every
    string Hermitian (``Y = iXZ``).
    """

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("a Pauli string needs at least one qubit")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise DimensionError("bit masks exceed the qubit count")

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        label = label.strip().upper()
        if not label or any(s not in _XZ for s in label):
            raise ValueError(f"invalid Pauli label {label!r}")
        n = len(label)
        x = z = 0
        for q, s in enumerate(label):
            bx, bz = _XZ[s]
            bit = n - 1 - q
            x |= bx << bit
            z |= bz << bit
        return cls(n, x, z)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, symbol: str) -> "PauliString":
        """``symbol`` on ``qubit`` (1-based), identity elsewhere."""
        if not 1 <= qubit <= n:
            raise DimensionError(f"qubit {qubit} outside 1..{n}")
        label = ["I"] * n
        label[qubit - 1] = symbol
        return cls.from_label("".join(label))

    @property
    def label(self) -> str:
        out = []
        for q in range(self.n):
            bit = self.n - 1 - q
            out.append(_BY_BITS[((self.x >> bit) & 1) | (((self.z >> bit) & 1) << 1)])
        return "".join(out)

    def __str__(self):
        return self.label

    def __repr__(self):
        return f"PauliString({self.label!r})"

    @property
    def y_count(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def is_real(self) -> bool:
        """True when the matrix has real entries (even number of Y)."""
        return self.y_count % 2 == 0

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(self.n + other.n, (self.x << other.n) | other.x,
                           (self.z << other.n) | other.z)

    def split(self, n_a: int) -> tuple["PauliString", "PauliString"]:
        """Split into the first ``n_a`` qubits and the remainder."""
        n_b = self.n - n_a
        if not 1 <= n_a < self.n:
            raise DimensionError(f"cannot split {self.n} qubits at {n_a}")
        mask = (1 << n_b) - 1
        return (PauliString(n_a, self.x >> n_b, self.z >> n_b),
                PauliString(n_b, self.x & mask, self.z & mask))

    def __mul__(self, other):
        return pauli_multiply(self, other)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Return ``P @ v`` for a vector (or a stack of column vectors)."""
        v = np.asarray(v)
        dim = 1 << self.n
        if v.shape[0] != dim:
            raise DimensionError(f"vector of length {v.shape[0]} for {self.n} qubits")
        out = _flip(v, self.x, self.n)
        if self.z:
            sign = _z_signs(self.n, self.z).astype(v.real.dtype, copy=False)
            # Z acts before X: sign is evaluated on the source index c ^ x
            sign = _flip(sign, self.x, self.n) if self.x else sign
            out = out * (sign if v.ndim == 1 else sign[:, None])
        phase = _PHASES[self.y_count % 4]
        if phase != 1:
            out = out * phase
        return out

    def to_dense(self) -> np.ndarray:
        if self.n > 14:
            raise ResourceError("refusing to materialize a Pauli string above 14 qubits")
        return self.apply(np.eye(1 << self.n, dtype=complex))


def _flip(v, x, n):
    if not x:
        return v.copy()
    shape = v.shape
    t = v.reshape((2,) * n + shape[1:])
    axes = tuple(q for q in range(n) if (x >> (n - 1 - q)) & 1)
    return np.flip(t, axis=axes).reshape(shape)


@lru_cache(maxsize=64)
def _basis_indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _z_signs(n: int, z: int) -> np.ndarray:
    par = np.bitwise_count(_basis_indices(n) & z) & 1
    return 1 - 2 * par.astype(np.int8)


def pauli_multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Multiply two Pauli strings, returning ``(phase, product)`` with
    ``a @ b == phase * product`` and ``phase`` in ``{1, i, -1, -i}``."""
    if a.n != b.n:
        raise DimensionError(f"length mismatch {a.n} vs {b.n}")
    x, z = a.x ^ b.x, a.z ^ b.z
    k = a.y_count + b.y_count - _popcount(x & z) + 2 * _popcount(a.z & b.x)
    return _PHASES[k % 4], PauliString(a.n, x, z)


# ---------------------------------------------------------------------------
# Pauli sums
# ---------------------------------------------------------------------------

class PauliSum:
    """Real-weighted sum of Pauli strings, a Hermitian operator on ``qubits``.

    Duplicate strings are merged on construction and terms whose coefficient
    cancels to (numerical) zero are dropped. Term order is first-appearance
    order, which downstream code relies on for deterministic enumeration.
    """

    def __init__(self, qubits: int, terms=()):
        if qubits < 1:
            raise DimensionError("PauliSum needs at least one qubit")
        self.qubits = int(qubits)
        merged: dict[PauliString, float] = {}
        for c, p in terms:
            if isinstance(p, str):
                p = PauliString.from_label(p)
            if p.n != self.qubits:
                raise DimensionError(f"string {p} has {p.n} qubits, expected {self.qubits}")
            if np.iscomplexobj(c) and np.imag(c) != 0:
                raise ValueError("PauliSum coefficients must be real")
            merged[p] = merged.get(p, 0.0) + float(np.real(c))
        self._terms = tuple((c, p) for p, c in merged.items() if abs(c) > 1e-14)
        self._plan = None

    @classmethod
    def identity(cls, qubits: int, coeff: float = 1.0) -> "PauliSum":
        return cls(qubits, [(coeff, PauliString.identity(qubits))])

    @classmethod
    def from_labels(cls, pairs) -> "PauliSum":
        pairs = [(c, PauliString.from_label(s)) for c, s in pairs]
        if not pairs:
            raise ValueError("cannot infer the qubit count from no terms")
        return cls(pairs[0][1].n, pairs)

    @property
    def terms(self) -> tuple[tuple[float, PauliString], ...]:
        return self._terms

    @property
    def strings(self) -> list[PauliString]:
        return [p for _, p in self._terms]

    @property
    def dim(self) -> int:
        return 1 << self.qubits

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __repr__(self):
        body = " + ".join(f"{c:g}*{p.label}" for c, p in self._terms[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"PauliSum({self.qubits}: {body or '0'}{more})"

    def __eq__(self, other):
        if not isinstance(other, PauliSum) or other.qubits != self.qubits:
            return NotImplemented
        return dict((p, c) for c, p in self._terms) == dict((p, c) for c, p in other._terms)

    __hash__ = None

    def __add__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        if other.qubits != self.qubits:
            raise DimensionError("qubit count mismatch")
        return PauliSum(self.qubits, self._terms + other._terms)

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        s = float(s)
        return PauliSum(self.qubits, [(s * c, p) for c, p in self._terms])

    __rmul__ = __mul__

    def l1_norm(self) -> float:
        return float(sum(abs(c) for c, _ in self._terms))

    def is_real(self) -> bool:
        return all(p.is_real() for _, p in self._terms)

    def tensor(self, other: "PauliSum") -> "PauliSum":
        """``self (x) other`` with ``self`` on the leading qubits."""
        return PauliSum(self.qubits + other.qubits,
                        [(a * b, p.tensor(q)) for a, p in self._terms for b, q in other._terms])

    def split(self, n_a: int) -> list[tuple[float, PauliString, PauliString]]:
        return [(c, *p.split(n_a)) for c, p in self._terms]

    def to_kron(self, n_a: int) -> "KronOperator":
        """Kronecker form across the cut after qubit ``n_a``, grouped by the A-side string."""
        if not 1 <= n_a < self.qubits:
            raise DimensionError(f"cut {n_a} outside 1..{self.qubits - 1}")
        groups: dict[PauliString, list] = {}
        for c, pa, pb in self.split(n_a):
            groups.setdefault(pa, []).append((c, pb))
        n_b = self.qubits - n_a
        pairs = [(1.0, PauliSum(n_a, [(1.0, pa)]), PauliSum(n_b, rest)) for pa, rest in groups.items()]
        return KronOperator(1 << n_a, 1 << n_b, pairs)

    # -- matrix-free action --------------------------------------------------

    def _build_plan(self):
        # group terms by X mask; each group is a diagonal (or scalar) times a flip
        groups: dict[int, list] = {}
        for c, p in self._terms:
            groups.setdefault(p.x, []).append((c, p))
        plan = []
        for x, items in groups.items():
            if all(p.z == 0 for _, p in items):
                diag = sum(c for c, _ in items)
            else:
                is_real = all(p.is_real() for _, p in items)
                diag = np.zeros(self.dim, dtype=float if is_real else complex)
                for c, p in items:
                    s = _z_signs(self.qubits, p.z)
                    if x:
                        s = _flip(s, x, self.qubits)
                    ph = _PHASES[p.y_count % 4]
                    diag += (c * ph.real if is_real else c * ph) * s
            plan.append((x, diag))
        return plan

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Apply the operator to ``v`` without forming the matrix."""
        v = np.asarray(v)
        if v.shape[0] != self.dim:
            raise DimensionError(f"vector length {v.shape[0]} for {self.qubits} qubits")
        if self._plan is None:
            self._plan = self._build_plan()
        dtype = np.result_type(v.dtype, float if self.is_real() else complex)
        out = np.zeros(v.shape, dtype=dtype)
        for x, diag in self._plan:
            w = _flip(v, x, self.qubits) if x else v
            if np.isscalar(diag):
                out += diag * w
            else:
                out += (diag if v.ndim == 1 else diag[:, None]) * w
        return out

    def expectation(self, v: np.ndarray) -> float:
        """``<v|H|v>`` for a (not necessarily normalized) vector."""
        return float(np.real(np.vdot(v, self.matvec(v))))

    def product_expectation(self, u: np.ndarray, v: np.ndarray, n_a: int) -> float:
        """``<u (x) v| H |u (x) v>`` evaluated party by party."""
        cache_a: dict = {}
        cache_b: dict = {}
        total = 0.0
        for c, pa, pb in self.split(n_a):
            if pa not in cache_a:
                cache_a[pa] = np.vdot(u, pa.apply(u))
            if pb not in cache_b:
                cache_b[pb] = np.vdot(v, pb.apply(v))
            total += c * np.real(cache_a[pa] * cache_b[pb])
        return float(total)

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        return materialize_dense(self, cap)


# ---------------------------------------------------------------------------
# Kronecker-structured operators
# ---------------------------------------------------------------------------

def _op_dim(op) -> int:
    if isinstance(op, PauliSum):
        return op.dim
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {op.shape}")
    return op.shape[0]


class KronOperator:
    """``sum_m c_m K_m (x) L_m`` with each factor dense or a :class:`PauliSum`."""

    def __init__(self, dim_a: int, dim_b: int, pairs):
        self.dim_a = int(dim_a)
        self.dim_b = int(dim_b)
        checked = []
        for c, k, l in pairs:
            if _op_dim(k) != self.dim_a or _op_dim(l) != self.dim_b:
                raise DimensionError(
                    f"pair factor dims ({_op_dim(k)}, {_op_dim(l)}) != ({self.dim_a}, {self.dim_b})")
            checked.append((float(c), k, l))
        self.pairs = tuple(checked)
        self._dense = None
        self._stacks = None

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        return f"KronOperator(dim_a={self.dim_a}, dim_b={self.dim_b}, pairs={len(self)})"

    def densified(self, cap: int = DENSE_CAP) -> "KronOperator":
        """Copy with every factor materialized as a dense array (cached)."""
        if self._dense is None:
            if max(self.dim_a, self.dim_b) > cap:
                raise ResourceError(f"party dimension exceeds dense cap {cap}")
            pairs = [(c, _as_dense(k, cap), _as_dense(l, cap)) for c, k, l in self.pairs]
            self._dense = KronOperator(self.dim_a, self.dim_b, pairs)
            self._dense._dense = self._dense
        return self._dense

    def stacks(self):
        """Coefficients and stacked dense factors ``(c, Ks, Ls)``."""
        d = self.densified()
        if getattr(d, "_stacks", None) is None:
            c = np.array([p[0] for p in d.pairs])
            ks = np.array([p[1] for p in d.pairs])
            ls = np.array([p[2] for p in d.pairs])
            d._stacks = (c, ks, ls)
        return d._stacks

    def product_expectation(self, u: np.ndarray, v: np.ndarray) -> float:
        total = 0.0
        for c, k, l in self.pairs:
            total += c * _expect(k, u) * _expect(l, v)
        return float(total)

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        return materialize_dense(self, cap)


def _as_dense(op, cap=DENSE_CAP):
    if isinstance(op, PauliSum):
        return materialize_dense(op, cap)
    return np.asarray(op, dtype=complex)


def _expect(op, u):
    if isinstance(op, PauliSum):
        return op.expectation(u)
    return float(np.real(np.vdot(u, np.asarray(op) @ u)))


def materialize_dense(op, cap: int = DENSE_CAP) -> np.ndarray:
    """Exact dense matrix of a :class:`PauliSum` or :class:`KronOperator`.

    Raises :class:`ResourceError` when the total dimension exceeds ``cap``.
    """
    if isinstance(op, PauliSum):
        dim = op.dim
        if dim > cap:
            raise ResourceError(f"dimension {dim} exceeds dense cap {cap}")
        out = np.zeros((dim, dim), dtype=complex)
        idx = _basis_indices(op.qubits)
        for c, p in op.terms:
            # P|c'> = phase (-1)^{|z & c'|} |c' ^ x>, fill column c'
            col_sign = _z_signs(op.qubits, p.z)
            out[idx ^ p.x, idx] += c * _PHASES[p.y_count % 4] * col_sign
        return out
    if isinstance(op, KronOperator):
        dim = op.dim_a * op.dim_b
        if dim > cap:
            raise ResourceError(f"dimension {dim} exceeds dense cap {cap}")
        out = np.zeros((dim, dim), dtype=complex)
        for c, k, l in op.pairs:
            out += c * np.kron(_as_dense(k), _as_dense(l))
        return out
    arr = np.asarray(op)
    if arr.shape[0] > cap:
        raise ResourceError(f"dimension {arr.shape[0]} exceeds dense cap {cap}")
    return arr


# ---------------------------------------------------------------------------
# dense helpers and partial-trace contractions
# ---------------------------------------------------------------------------

def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``Tr(a^* b)``."""
    return np.vdot(a, b)


def hermitian_error(a: np.ndarray) -> float:
    a = np.asarray(a)
    scale = max(np.abs(a).max(initial=0.0), 1e-300)
    return float(np.abs(a - a.conj().T).max(initial=0.0) / scale)


def is_hermitian(a: np.ndarray, tol: float = 1e-10) -> bool:
    a = np.asarray(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and hermitian_error(a) <= tol


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def is_density_matrix(rho: np.ndarray, tol: float = 1e-9) -> bool:
    rho = np.asarray(rho)
    if not is_hermitian(rho, 1e-10):
        return False
    if abs(np.trace(rho).real - 1.0) > tol:
        return False
    return np.linalg.eigvalsh(hermitize(rho)).min() >= -tol


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def basis_state(n: int, index: int = 0) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    v[index] = 1.0
    return v


def uniform_state(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def haar_state(dim: int, rng) -> np.ndarray:
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    rng = np.random.default_rng(rng)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _split_dims(c, d_known, side):
    c = np.asarray(c)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % d_known:
        raise DimensionError(f"operator of shape {c.shape} does not factor with a {side}-party of dim {d_known}")
    return c.shape[0] // d_known


def contract_a(c: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``Tr_A[(rho (x) 1) C]``, the operator on B seen by ``sigma`` when A is fixed."""
    rho = np.asarray(rho)
    da = rho.shape[0]
    db = _split_dims(c, da, "A")
    c4 = np.asarray(c).reshape(da, db, da, db)
    return np.einsum("ij,jbid->bd", rho, c4)


def contract_b(c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """``Tr_B[(1 (x) sigma) C]``, the operator on A seen by ``rho`` when B is fixed."""
    sigma = np.asarray(sigma)
    db = sigma.shape[0]
    da = _split_dims(c, db, "B")
    c4 = np.asarray(c).reshape(da, db, da, db)
    return np.einsum("ij,ajdi->ad", sigma, c4)


def kron_contract(op: KronOperator, side: str, state: np.ndarray) -> np.ndarray:
    """Contract a Kronecker-structured operator with a state on ``side``.

    ``side="A"`` returns ``sum_m c_m <state, K_m> L_m`` (an operator on B),
    ``side="B"`` returns ``sum_m c_m <state, L_m> K_m`` (an operator on A).
    Only ``d x d`` factors are touched.
    """
    state = np.asarray(state)
    coeffs, ks, ls = op.stacks()
    if side == "A":
        if state.shape != (op.dim_a, op.dim_a):
            raise DimensionError(f"state shape {state.shape} on A of dim {op.dim_a}")
        w = coeffs * np.einsum("ij,mij->m", state.conj(), ks).real
        return np.tensordot(w, ls, axes=1)
    if side == "B":
        if state.shape != (op.dim_b, op.dim_b):
            raise DimensionError(f"state shape {state.shape} on B of dim {op.dim_b}")
        w = coeffs * np.einsum("ij,mij->m", state.conj(), ls).real
        return np.tensordot(w, ks, axes=1)
    raise ValueError(f"side must be 'A' or 'B', got {side!r}")


# ---------------------------------------------------------------------------
# JSON operator files
# ---------------------------------------------------------------------------

class OperatorFormatError(ValueError):
    """Malformed operator file; ``where`` names the offending field."""

    def __init__(self, message, where=""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


def operator_to_json(op) -> dict:
    if isinstance(op, PauliSum):
        return {"kind": "pauli_sum", "qubits": op.qubits,
                "terms": [{"c": c, "p": p.label} for c, p in op.terms]}
    if isinstance(op, KronOperator):
        return {"kind": "kron", "dimA": op.dim_a, "dimB": op.dim_b,
                "pairs": [{"c": c, "K": operator_to_json(k), "L": operator_to_json(l)}
                          for c, k, l in op.pairs]}
    arr = np.asarray(op, dtype=complex)
    return {"kind": "dense", "dim": arr.shape[0], "re": arr.real.tolist(), "im": arr.imag.tolist()}


def _field(obj, key, where):
    if not isinstance(obj, dict):
        raise OperatorFormatError("expected a JSON object", where)
    if key not in obj:
        raise OperatorFormatError(f"missing field {key!r}", where)
    return obj[key]


def operator_from_json(obj, where: str = "$"):
    """Parse the dict form of an operator file (see :func:`operator_to_json`)."""
    kind = _field(obj, "kind", where)
    if kind == "pauli_sum":
        n = _field(obj, "qubits", where)
        terms = _field(obj, "terms", where)
        parsed = []
        for i, t in enumerate(terms):
            w = f"{where}.terms[{i}]"
            c, label = _field(t, "c", w), _field(t, "p", w)
            try:
                parsed.append((float(c), PauliString.from_label(label)))
            except (TypeError, ValueError) as exc:
                raise OperatorFormatError(str(exc), w) from None
        try:
            return PauliSum(int(n), parsed)
        except DimensionError as exc:
            raise OperatorFormatError(str(exc), where) from None
    if kind == "dense":
        dim = int(_field(obj, "dim", where))
        re = np.asarray(_field(obj, "re", where), dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != (dim, dim) or im.shape != (dim, dim):
            raise OperatorFormatError(f"re/im must be {dim}x{dim}", where)
        arr = re + 1j * im
        if not is_hermitian(arr):
            raise OperatorFormatError("dense operator is not Hermitian", where)
        return arr
    if kind == "kron":
        da = int(_field(obj, "dimA", where))
        db = int(_field(obj, "dimB", where))
        pairs = []
        for i, pr in enumerate(_field(obj, "pairs", where)):
            w = f"{where}.pairs[{i}]"
            pairs.append((float(_field(pr, "c", w)),
                          operator_from_json(_field(pr, "K", w), w + ".K"),
                          operator_from_json(_field(pr, "L", w), w + ".L")))
        try:
            return KronOperator(da, db, pairs)
        except DimensionError as exc:
            raise OperatorFormatError(str(exc), where) from None
    raise OperatorFormatError(f"unknown kind {kind!r}", where)


def load_operator(path):
    with open(path) as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise OperatorFormatError(f"invalid JSON ({exc.msg})", f"line {exc.lineno} col {exc.colno}") from None
    return operator_from_json(obj)


def save_operator(op, path):
    with open(path, "w") as fh:
        json.dump(operator_to_json(op), fh)
