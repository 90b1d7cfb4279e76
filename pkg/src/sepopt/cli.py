"""
Command-line front end.

Exit codes: 0 success, 1 input error, 2 non-convergence (result still
written), 3 degenerate Gram matrix.

Every run emits a manifest (command, flags, seed, backend, phase timings,
SHA-256 of input files). With ``--out DIR`` the main output and
``manifest.json`` are written to ``DIR``; otherwise the main output goes to
stdout and, for CSV outputs, the manifest to stderr.

Seeding: ``--seed`` is the root of every stochastic choice. Random see-saw
starts use ``SeedSequence(seed)``, reference states ``SeedSequence(seed)``
spawned per party, and shot sampling ``SeedSequence([seed, tag, ...])`` per
measurement job.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .ansatz import build_ansatz, reference_state
from .bench import bench_dense, bench_structured
from .coprocessor import BackendConfig
from .errors import ConvergenceError, DegenerateGramError, DimensionError, ResourceError, UndefinedMeasureError
from .ising import (DEFAULT_RAM_CAP, AnsatzSettings, IsingParams, ansatz_sweep, entanglement_measure, exact_fits,
                    solve_reduced)
from .numerics import GRAM_CUTOFF, lanczos_extremal
from .operators import KronOperator, OperatorFormatError, PauliString, PauliSum, load_operator
from .reduction import build_reduced_kron_problem
from .seesaw import INIT_KINDS, SeesawConfig, seesaw_dense, seesaw_kron

EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_DEGENERATE = 0, 1, 2, 3

SCAN_COLUMNS = ("h", "alpha_hat", "lambda_max", "lambda_min", "delta_hat", "flags")
SWEEP_COLUMNS = ("L", "trial", "alpha_L_i", "mean_L", "max_L")
BENCH_COLUMNS = ("path", "dim", "terms", "iter_time", "total_time")


class InputError(Exception):
    pass


class RunManifest:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.timings: dict[str, float] = {}
        self.inputs: dict[str, str] = {}
        self.extra: dict = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0

    def hash_input(self, path: str):
        with open(path, "rb") as fh:
            self.inputs[path] = hashlib.sha256(fh.read()).hexdigest()

    def to_json(self) -> dict:
        flags = {k: v for k, v in vars(self.args).items() if k != "func"}
        backend = BackendConfig.from_shots(self.args.shots, self.args.seed)
        return {"command": self.args.command, "flags": flags, "seed": self.args.seed,
                "backend": {"mode": backend.mode, "shots": backend.shots, "seed": backend.seed},
                "timings": self.timings, "inputs": self.inputs, "version": __version__,
                "numpy": np.__version__, "python": platform.python_version(), **self.extra}


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _seesaw_cfg(args) -> SeesawConfig:
    kinds = INIT_KINDS if args.init == "all" else tuple(k.strip() for k in args.init.split(","))
    try:
        return SeesawConfig(init=kinds, restarts=args.restarts, max_iters=args.max_iters,
                            rel_tol=args.tol, seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _backend(args) -> BackendConfig:
    if args.shots < 0:
        raise InputError("--shots must be >= 0")
    return BackendConfig.from_shots(args.shots, args.seed)


def _ram_cap(args) -> float:
    return args.ram_cap * 2**30


def _load(args, manifest) -> object:
    try:
        manifest.hash_input(args.operator)
        return load_operator(args.operator)
    except OSError as exc:
        raise InputError(f"cannot read {args.operator}: {exc.strerror}") from None


def _qubits_of(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise InputError(f"dimension {dim} is not a power of two")
    return n


def _kron_form(op, split) -> KronOperator:
    if isinstance(op, KronOperator):
        return op
    if isinstance(op, PauliSum):
        return op.to_kron(split if split is not None else op.qubits // 2)
    raise InputError("operator has no two-party structure")


def _dense_dims(dim: int, dim_a) -> tuple[int, int]:
    if dim_a is None:
        dim_a = int(round(np.sqrt(dim)))
        if dim_a * dim_a != dim:
            raise InputError(f"dimension {dim} is not a square; pass --dim-a")
    if dim % dim_a:
        raise InputError(f"--dim-a {dim_a} does not divide {dim}")
    return dim_a, dim // dim_a


def _party_generators(factors, nq: int) -> list[PauliString]:
    seen: dict[PauliString, None] = {}
    for f in factors:
        if not isinstance(f, PauliSum):
            raise InputError("ansatz generation needs Pauli-sum factors")
        for p in f.strings:
            if not p.is_identity():
                seen.setdefault(p, None)
    return list(seen) or [PauliString.identity(nq)]


def _full_pauli_sum(op: KronOperator) -> PauliSum | None:
    if not all(isinstance(f, PauliSum) for _, k, l in op.pairs for f in (k, l)):
        return None
    out = None
    for c, k, l in op.pairs:
        t = k.tensor(l) * c
        out = t if out is None else out + t
    return out


def _vec_json(v):
    v = np.asarray(v)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _emit(args, manifest, name: str, payload):
    """Write the main output (dict → JSON, str → CSV text) and the manifest."""
    man = manifest.to_json()
    if isinstance(payload, dict):
        payload = dict(payload, manifest=man)
        text = json.dumps(payload, indent=2)
        ext = "json"
    else:
        text = payload
        ext = "csv"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{name}.{ext}"), "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        with open(os.path.join(args.out, "manifest.json"), "w") as fh:
            json.dump(man, fh, indent=2)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        if ext == "csv":
            sys.stderr.write(json.dumps(man) + "\n")


def _pool(args):
    return ThreadPoolExecutor(max_workers=max(1, args.threads or os.cpu_count() or 1))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_solve(args, manifest) -> int:
    op = _load(args, manifest)
    cfg = _seesaw_cfg(args)
    with manifest.phase("seesaw"):
        if isinstance(op, np.ndarray):
            da, db = _dense_dims(op.shape[0], args.dim_a)
            res = seesaw_dense(op, da, db, cfg)
        else:
            res = seesaw_kron(_kron_form(op, args.split), cfg)
    _emit(args, manifest, "solve", res.to_json())
    return EXIT_OK if res.converged else EXIT_NOCONV


def cmd_reduce_solve(args, manifest) -> int:
    op = _load(args, manifest)
    if isinstance(op, np.ndarray):
        raise InputError("reduce-solve needs a pauli_sum or kron operator file")
    kop = _kron_form(op, args.split)
    na, nb = _qubits_of(kop.dim_a), _qubits_of(kop.dim_b)
    backend = _backend(args)
    seeds = np.random.SeedSequence(args.seed).spawn(2)
    with manifest.phase("ansatz"):
        sets = []
        for party, nq, size, seed, idx in (("A", na, args.ansatz_size, seeds[0], 1),
                                           ("B", nb, args.ansatz_size_b or args.ansatz_size, seeds[1], 2)):
            gens = _party_generators([p[idx] for p in kop.pairs], nq)
            ref = reference_state(args.ref, nq, seed)
            sets.append(build_ansatz(gens, ref, args.ansatz_order, min(size, 1 << nq), args.cutoff, party))
    with manifest.phase("reduce"):
        problem = build_reduced_kron_problem(kop, sets[0], sets[1], backend, args.cutoff)
    with manifest.phase("seesaw"):
        sol = solve_reduced(problem, _seesaw_cfg(args))
    out = {"value": sol.alpha, "reduced_value": sol.lifted.reduced_value, "gap": sol.lifted.gap,
           "reference_energy": sol.reference_energy,
           "ansatz": {"A": {"size": sets[0].size, "order": sets[0].order, "paulis": [p.label for p in sets[0].strings]},
                      "B": {"size": sets[1].size, "order": sets[1].order, "paulis": [p.label for p in sets[1].strings]}},
           "whitened_dims": list(problem.dims), "seesaw": sol.seesaw.to_json(),
           "state_a": _vec_json(sol.state_a), "state_b": _vec_json(sol.state_b)}
    _emit(args, manifest, "reduce-solve", out)
    return EXIT_OK if sol.seesaw.converged else EXIT_NOCONV


def cmd_eig(args, manifest) -> int:
    op = _load(args, manifest)
    if isinstance(op, KronOperator):
        op = _full_pauli_sum(op) or op.to_dense()
    dim = op.dim if isinstance(op, PauliSum) else op.shape[0]
    if dim * 16 * 4 > _ram_cap(args):
        raise ResourceError(f"dimension {dim} does not fit the RAM cap of {args.ram_cap} GB")
    out = {"dim": dim}
    code = EXIT_OK
    with manifest.phase("lanczos"):
        for which in ("max", "min"):
            try:
                out[f"lambda_{which}"] = lanczos_extremal(op, which=which, iters=args.max_iters, tol=args.tol,
                                                          seed=args.seed, memory_bytes=_ram_cap(args))
            except ConvergenceError as exc:
                out[f"lambda_{which}"] = exc.best
                out.setdefault("unconverged", []).append(which)
                code = EXIT_NOCONV
    _emit(args, manifest, "eig", out)
    return code


def _parse_range(text: str) -> np.ndarray:
    try:
        a, b, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise InputError(f"--h-range must be a:b:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise InputError("--h-range needs step > 0 and b >= a")
    count = int(np.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(count), 12)


def _ising(args, h) -> IsingParams:
    try:
        return IsingParams(args.n, args.j, args.g, h, args.split)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_delta_scan(args, manifest) -> int:
    hs = _parse_range(args.h_range)
    cfg = _seesaw_cfg(args)
    settings = AnsatzSettings(args.ansatz_size, order=args.ansatz_order, reference=args.ref, seed=args.seed,
                              cutoff=args.cutoff)
    base = _ising(args, 0.0)
    if not exact_fits(base.n, _ram_cap(args)) and args.ansatz_size < 2:
        raise InputError("spectrum exceeds the RAM cap; pass --ansatz-size for the estimated spectrum")
    method = args.method if args.method != "auto" else None

    def point(h):
        return entanglement_measure(base.with_h(float(h)), cfg, method=method, ansatz=settings,
                                    ram_cap=_ram_cap(args), lanczos_seed=args.seed)

    with manifest.phase("scan"), _pool(args) as pool:
        reports = list(pool.map(point, hs))
    rows = [(float(h), r.alpha_hat, r.lambda_max, r.lambda_min, r.delta_hat, r.flag_string)
            for h, r in zip(hs, reports)]
    _emit(args, manifest, "delta-scan", _csv_text(SCAN_COLUMNS, rows))
    return EXIT_OK


def cmd_ansatz_sweep(args, manifest) -> int:
    try:
        sizes = sorted({int(x) for x in args.l_values.split(",")})
    except ValueError:
        raise InputError(f"--l-values must be comma-separated integers, got {args.l_values!r}") from None
    if not sizes or sizes[0] < 1:
        raise InputError("ansatz sizes must be >= 1")
    p = _ising(args, args.h)
    with manifest.phase("sweep"):
        res = ansatz_sweep(p, sizes, trials=args.trials, seed=args.seed, backend=_backend(args),
                           cfg=_seesaw_cfg(args), order=args.ansatz_order, reference=args.ref,
                           direct=max(p.n_a, p.n_b) <= 12, cutoff=args.cutoff)
    stats = {s["L"]: s for s in res.summary()}
    rows = [(r.size, r.trial, r.alpha, stats[r.size]["mean"], stats[r.size]["max"]) for r in res.rows]
    manifest.extra["alpha_direct"] = res.alpha_direct
    _emit(args, manifest, "ansatz-sweep", _csv_text(SWEEP_COLUMNS, rows))
    return EXIT_OK


def cmd_bench(args, manifest) -> int:
    rows = []
    with manifest.phase("bench"):
        for d in _int_list(args.dims):
            r = bench_structured(d, args.pairs, args.sweeps, args.seed)
            rows.append((r.path, r.dim, r.terms, r.iter_time, r.total_time))
        for d in _int_list(args.dense_dims):
            r = bench_dense(d, args.sweeps, args.seed)
            rows.append((r.path, r.dim, r.terms, r.iter_time, r.total_time))
    _emit(args, manifest, "bench", _csv_text(BENCH_COLUMNS, rows))
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _order(text):
    return text if text == "auto" else int(text)


def _add_global(p, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="root seed for every stochastic choice")
    p.add_argument("--shots", type=int, default=d(0), help="shots per estimated scalar (0 = exact)")
    p.add_argument("--threads", type=int, default=d(None), help="worker pool size (default: all cores)")
    p.add_argument("--out", default=d(None), metavar="DIR", help="write outputs and manifest here")
    p.add_argument("--ram-cap", type=float, default=d(DEFAULT_RAM_CAP / 2**30), metavar="GB",
                   help="memory budget for full-space vectors")


def _add_seesaw(p, init="mixed,uniform,random"):
    p.add_argument("--init", default=init, help="comma list of mixed,uniform,random or 'all'")
    p.add_argument("--restarts", type=int, default=None, help="random starts (default 100)")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-9, help="relative improvement per sweep")


def _add_ansatz(p, size=16):
    p.add_argument("--ansatz-order", type=_order, default="auto", metavar="K")
    p.add_argument("--ansatz-size", type=int, default=size, metavar="L")
    p.add_argument("--ref", choices=("zero", "uniform", "random"), default="random")
    p.add_argument("--cutoff", type=float, default=GRAM_CUTOFF, help="relative Gram eigenvalue cutoff")


def _add_ising(p):
    p.add_argument("--n", type=int, required=True, help="number of qubits")
    p.add_argument("--split", type=int, default=None, metavar="NA", help="qubits of party A (default n/2)")
    p.add_argument("--j", type=float, default=1.0)
    p.add_argument("--g", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepopt", description="Separable-state optimization toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_global(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="see-saw on an operator file")
    p.add_argument("operator")
    p.add_argument("--split", type=int, default=None, help="party-A qubits for pauli_sum files")
    p.add_argument("--dim-a", type=int, default=None, help="party-A dimension for dense files")
    _add_seesaw(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("reduce-solve", help="ansatz reduction, see-saw and lift")
    p.add_argument("operator")
    p.add_argument("--split", type=int, default=None, help="party-A qubits for pauli_sum files")
    p.add_argument("--ansatz-size-b", type=int, default=None, metavar="M")
    _add_ansatz(p)
    _add_seesaw(p, init="mixed,uniform")
    p.set_defaults(func=cmd_reduce_solve)

    p = sub.add_parser("eig", help="extremal eigenvalues by Lanczos")
    p.add_argument("operator")
    p.add_argument("--max-iters", type=int, default=200, help="Krylov dimension per restart")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("ising-delta-scan", help="entanglement measure over a field range")
    _add_ising(p)
    p.add_argument("--h-range", default="0:5:0.1", metavar="a:b:step")
    p.add_argument("--method", choices=("auto", "direct", "reduced"), default="auto")
    _add_ansatz(p, size=1)
    _add_seesaw(p)
    p.set_defaults(func=cmd_delta_scan)

    p = sub.add_parser("ising-ansatz-sweep", help="reduced energies versus ansatz size")
    _add_ising(p)
    p.add_argument("--h", type=float, default=1.3)
    p.add_argument("--l-values", default="4,8,16,32,64")
    p.add_argument("--trials", type=int, default=10)
    _add_ansatz(p)
    _add_seesaw(p, init="mixed,uniform")
    p.set_defaults(func=cmd_ansatz_sweep)

    p = sub.add_parser("bench", help="time see-saw sweeps")
    p.add_argument("--dims", default="30,100,512", help="structured local dimensions")
    p.add_argument("--dense-dims", default="30", help="dense-path local dimensions")
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--sweeps", type=int, default=20)
    p.set_defaults(func=cmd_bench)

    for name, sp in sub.choices.items():
        _add_global(sp, suppress=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = RunManifest(args)
    try:
        return args.func(args, manifest)
    except (InputError, OperatorFormatError, DimensionError, ResourceError, UndefinedMeasureError) as exc:
        print(f"sepopt: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateGramError as exc:
        print(f"sepopt: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceError as exc:
        print(f"sepopt: did not converge: {exc} (best estimate {exc.best})", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())
