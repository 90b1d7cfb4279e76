import numpy as np
import pytest

from sepopt.errors import ResourceError, UndefinedMeasureError
from sepopt.ising import (AnsatzSettings, IsingParams, ansatz_spectrum, ansatz_sweep, build_ising, delta_hat,
                          delta_scan, entanglement_measure, entanglement_report, exact_fits, separable_ground_energy,
                          special_hamiltonian, split_ising_kron)
from sepopt.numerics import lanczos_extremal
from sepopt.seesaw import BEST_OF_ALL, SeesawConfig

FAST = SeesawConfig(init=("mixed", "uniform", "random"), restarts=10)


def test_params():
    assert IsingParams(6).n_a == 3
    assert IsingParams(7).n_b == 4
    with pytest.raises(ValueError):
        IsingParams(4, n_a=4)
    with pytest.raises(ValueError):
        IsingParams(4, n_a=0)


def test_build_examples():
    two = build_ising(IsingParams(2, 1.0, 0.0, 0.0))
    assert [(c, p.label) for c, p in two.terms] == [(-2.0, "ZZ")]
    assert np.linalg.eigvalsh(two.to_dense())[-1] == pytest.approx(2)
    three = build_ising(IsingParams(3, 0.0, 0.0, 1.0))
    assert sorted(p.label for _, p in three.terms) == ["IIX", "IXI", "XII"]
    assert np.linalg.eigvalsh(three.to_dense())[-1] == pytest.approx(3)
    four = build_ising(IsingParams(4, 1.0, 0.0, 1.3))
    assert lanczos_extremal(four) == pytest.approx(np.linalg.eigvalsh(four.to_dense())[-1], abs=1e-8)
    assert len(build_ising(IsingParams(5, 1.0, 0.5, 0.5))) == 15


@pytest.mark.parametrize("n,n_a", [(2, 1), (3, 1), (4, 2), (5, 2), (6, 3), (8, 3), (10, 5), (12, 6)])
def test_split_equals_build(n, n_a):
    p = IsingParams(n, 0.9, 0.4, 1.3, n_a)
    op = split_ising_kron(p)
    if n <= 8:
        np.testing.assert_allclose(op.to_dense(), build_ising(p).to_dense(), atol=1e-10)
    else:
        # compare matrix-free on random vectors
        rng = np.random.default_rng(n)
        h = build_ising(p)
        v = rng.standard_normal(1 << n)
        out = np.zeros(1 << n, dtype=complex)
        for c, k, l in op.pairs:
            out += c * (k.to_dense() @ v.reshape(k.dim, l.dim) @ l.to_dense().T).ravel()
        np.testing.assert_allclose(out, h.matvec(v), atol=1e-10)


def test_split_pair_counts():
    assert len(split_ising_kron(IsingParams(4, 1.0, 0.0, 1.0, 2))) == 6
    two = split_ising_kron(IsingParams(2, 1.0, 0.0, 0.0, 1))
    assert len(two) == 2
    for c, k, l in two.pairs:
        assert c == -1.0
        assert k.strings[0].label == "Z" and l.strings[0].label == "Z"


def test_classical_case_direct():
    p = IsingParams(6, 1.0, 0.0, 0.0)
    res = separable_ground_energy(p, cfg=FAST)
    assert res.alpha == pytest.approx(6.0, abs=1e-9)


def test_direct_equals_full_basis_reduced():
    p = IsingParams(8, 1.0, 0.0, 1.3)
    direct = separable_ground_energy(p, cfg=BEST_OF_ALL)
    reduced = separable_ground_energy(p, "reduced", AnsatzSettings(16), cfg=SeesawConfig(init=("mixed", "uniform")))
    assert reduced.alpha == pytest.approx(direct.alpha, abs=1e-6)
    assert reduced.lifted.gap <= 1e-8


def test_reduced_bounds():
    p = IsingParams(8, 1.0, 0.3, 1.1)
    lmax = np.linalg.eigvalsh(build_ising(p).to_dense())[-1]
    for size in (1, 3, 6):
        r = separable_ground_energy(p, "reduced", AnsatzSettings(size, seed=size),
                                    cfg=SeesawConfig(init=("mixed", "uniform")))
        assert r.alpha >= r.reference_energy - 1e-9
        assert r.alpha <= lmax + 1e-9
    one = separable_ground_energy(p, "reduced", AnsatzSettings(1), cfg=SeesawConfig(init="mixed"))
    assert one.alpha == pytest.approx(one.reference_energy, abs=1e-12)


def test_method_errors():
    with pytest.raises(ValueError):
        separable_ground_energy(IsingParams(4), "reduced")
    with pytest.raises(ValueError):
        separable_ground_energy(IsingParams(4), "magic")
    with pytest.raises(ResourceError):
        separable_ground_energy(IsingParams(4), dense_cap=2)


def test_delta_hat_formula():
    assert delta_hat(2.0, -2.0, 1.0) == pytest.approx(0.25)
    with pytest.raises(UndefinedMeasureError):
        delta_hat(1.0, 1.0, 1.0)


def test_special_hamiltonian_report():
    rep = entanglement_report(special_hamiltonian(0.1), 2, 2)
    assert rep.lambda_max == pytest.approx(1, abs=1e-12)
    assert rep.lambda_min == pytest.approx(0, abs=1e-12)
    assert 0.9 <= rep.alpha_hat <= 1.0
    assert rep.delta_hat <= 0.1 + 1e-9
    assert rep.delta_hat == pytest.approx((rep.lambda_max - rep.alpha_hat) / (rep.lambda_max - rep.lambda_min))


def test_identity_is_undefined():
    with pytest.raises(UndefinedMeasureError):
        entanglement_report(np.eye(4), 2, 2)


@pytest.mark.parametrize("n", [4, 6, 8])
def test_classical_delta_vanishes(n):
    rep = entanglement_measure(IsingParams(n), FAST)
    assert abs(rep.delta_hat) <= 1e-6
    assert rep.flags["eig"] == "exact"


def test_delta_in_unit_interval():
    for h in (0.5, 1.0, 1.5, 3.0):
        rep = entanglement_measure(IsingParams(6, h=h), FAST)
        assert -1e-9 <= rep.delta_hat <= 1 + 1e-9
        assert rep.alpha_hat <= rep.lambda_max + 1e-9


def test_estimated_spectrum_provenance():
    p = IsingParams(6, h=1.3)
    s = AnsatzSettings(4)
    rep = entanglement_measure(p, FAST, ansatz=s, ram_cap=1.0)
    assert rep.flags == {"eig": "estimate", "alpha": "reduced"} and not rep.eig_exact
    assert -1e-9 <= rep.delta_hat <= 1 + 1e-9
    lmax, lmin = ansatz_spectrum(p, s)
    w = np.linalg.eigvalsh(build_ising(p).to_dense())
    assert lmax <= w[-1] + 1e-9 and lmin >= w[0] - 1e-9
    with pytest.raises(ValueError):
        entanglement_measure(p, FAST, ram_cap=1.0)


def test_exact_fits():
    assert exact_fits(20, 8 * 2**30)
    assert not exact_fits(30, 8 * 2**30)


def test_scan_and_sweep_small():
    rows = delta_scan(IsingParams(6), [0.0, 1.0], FAST)
    assert [h for h, _ in rows] == [0.0, 1.0]
    sw = ansatz_sweep(IsingParams(6, h=1.3), [2, 4, 8], trials=3)
    by = sw.by_size()
    assert list(by) == [2, 4, 8] and all(v.size == 3 for v in by.values())
    # warm starts make every trial non-decreasing in L
    for t in range(3):
        vals = [r.alpha for r in sw.rows if r.trial == t]
        assert np.all(np.diff(vals) >= -1e-9)
    assert by[8].max() == pytest.approx(sw.alpha_direct, abs=1e-6)
