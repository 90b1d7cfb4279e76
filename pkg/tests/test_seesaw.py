import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from sepopt.errors import DimensionError
from sepopt.ising import special_hamiltonian
from sepopt.operators import KronOperator, is_density_matrix, projector
from sepopt.seesaw import BEST_OF_ALL, SeesawConfig, initial_state, seesaw_dense, seesaw_kron

Z = np.diag([1.0, -1.0])


def assert_monotone(result):
    assert np.all(np.diff(result.trace) >= -1e-12)
    assert result.value == result.trace[-1]


def test_config_validation():
    with pytest.raises(ValueError):
        SeesawConfig(init="bogus")
    with pytest.raises(ValueError):
        SeesawConfig(rel_tol=0)
    with pytest.raises(ValueError):
        SeesawConfig(restarts=0)
    assert SeesawConfig(init="random").random_restarts == 100
    assert BEST_OF_ALL.kinds == ("mixed", "uniform", "random")


def test_initial_states():
    np.testing.assert_allclose(initial_state("mixed", 2), np.eye(2) / 2)
    np.testing.assert_allclose(initial_state("uniform", 2), np.full((2, 2), 0.5))
    a = initial_state("random", 5, seed=3)
    np.testing.assert_array_equal(a, initial_state("random", 5, seed=3))
    assert is_density_matrix(a) and np.linalg.matrix_rank(a, tol=1e-10) == 1


def test_product_projector():
    e = np.zeros(4)
    e[0] = 1
    res = seesaw_dense(projector(e), 2, 2)
    assert res.value == pytest.approx(1)
    np.testing.assert_allclose(res.rho, np.diag([1, 0]), atol=1e-12)
    np.testing.assert_allclose(res.sigma, np.diag([1, 0]), atol=1e-12)


def test_singlet_projector():
    psi = np.array([0, 1, -1, 0]) / np.sqrt(2)
    res = seesaw_dense(projector(psi), 2, 2, BEST_OF_ALL)
    assert res.value == pytest.approx(0.5, abs=1e-9)


def test_special_hamiltonian():
    res = seesaw_dense(special_hamiltonian(0.1), 2, 2, BEST_OF_ALL)
    assert 0.9 <= res.value <= 1.0 + 1e-12


def test_kron_zz():
    res = seesaw_kron(KronOperator(2, 2, [(1.0, Z, Z)]))
    assert res.value == pytest.approx(1)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        seesaw_dense(np.eye(6), 2, 2)
    with pytest.raises(DimensionError):
        seesaw_dense(np.eye(4), 2, 2, initial=[np.eye(3) / 3])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(2, 2), (2, 3), (3, 3), (4, 2)]))
def test_feasibility_monotonicity_and_bound(seed, dims):
    rng = np.random.default_rng(seed)
    da, db = dims
    c = random_hermitian(da * db, rng)
    res = seesaw_dense(c, da, db, SeesawConfig(init=("mixed", "uniform", "random"), restarts=5, seed=seed))
    assert_monotone(res)
    assert is_density_matrix(res.rho) and is_density_matrix(res.sigma)
    assert np.linalg.matrix_rank(res.rho, tol=1e-9) == 1
    assert res.value <= np.linalg.eigvalsh(c)[-1] + 1e-9
    assert res.value == pytest.approx(np.vdot(np.kron(res.rho, res.sigma), c).real, abs=1e-10)
    assert res.value == max(r.value for r in res.runs)


def test_every_run_is_monotone(rng):
    c = random_hermitian(9, rng)
    cfg = SeesawConfig(init="random", restarts=10)
    from sepopt.operators import contract_a, contract_b
    from sepopt.seesaw import _run
    for s in np.random.SeedSequence(0).spawn(10):
        _, _, trace, _, _ = _run(lambda r: contract_a(c, r), lambda s_: contract_b(c, s_),
                                 initial_state("random", 3, s), cfg.max_iters, cfg.rel_tol)
        assert np.all(np.diff(trace) >= -1e-12)


def test_dense_and_kron_paths_agree(rng):
    for _ in range(5):
        op = KronOperator(8, 8, [(rng.standard_normal(), random_hermitian(8, rng), random_hermitian(8, rng))
                                 for _ in range(4)])
        cfg = SeesawConfig(init=("mixed", "uniform", "random"), restarts=5)
        a = seesaw_kron(op, cfg)
        b = seesaw_dense(op.to_dense(), 8, 8, cfg)
        assert a.value == pytest.approx(b.value, abs=1e-8)
        np.testing.assert_allclose(a.trace, b.trace, atol=1e-8)


def test_fixed_point(rng):
    k, l = random_hermitian(4, rng), random_hermitian(3, rng)
    wk, vk = np.linalg.eigh(k)
    wl, vl = np.linalg.eigh(l)
    # make both top eigenvalues positive so the product of maxima is the optimum
    k, l = k - (wk[0] - 0.1) * np.eye(4), l - (wl[0] - 0.1) * np.eye(3)
    wk, wl = wk - wk[0] + 0.1, wl - wl[0] + 0.1
    res = seesaw_kron(KronOperator(4, 3, [(1.0, k, l)]), SeesawConfig(init="mixed"),
                      initial=[projector(vk[:, -1])])
    run = [r for r in res.runs if r.init == "given"][0]
    assert run.iterations <= 2
    assert run.value == pytest.approx(wk[-1] * wl[-1], abs=1e-10)


def test_max_iters_stop_flags_nonconvergence(rng):
    c = random_hermitian(16, rng)
    res = seesaw_dense(c, 4, 4, SeesawConfig(init="random", restarts=1, max_iters=1))
    assert not res.converged and res.iterations == 1


def test_restart_tie_break():
    res = seesaw_dense(np.eye(4), 2, 2, SeesawConfig(init=("mixed", "uniform", "random"), restarts=3))
    assert (res.init, res.restart_index) == ("mixed", 0)


def test_result_json(rng):
    res = seesaw_dense(random_hermitian(4, rng), 2, 2, SeesawConfig(init="random", restarts=2))
    obj = json.loads(json.dumps(res.to_json()))
    assert obj["value"] == res.value and obj["trace"] == res.trace
    assert len(obj["runs"]) == 2
