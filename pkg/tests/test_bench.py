import numpy as np
import pytest

from ncfuncalc import bench
from ncfuncalc.functions2d import Elementary2D, TrigPoly2D
from ncfuncalc.linalg import random_hermitian, random_unitary, schatten_1

X_COORD = Elementary2D(
    lambda x, y: x + 0 * y,
    lambda x, y: np.ones(np.broadcast(x, y).shape),
    lambda x, y: np.zeros(np.broadcast(x, y).shape),
)


def perturbed(seed, n=6, eps=1e-2):
    rng = np.random.default_rng(seed)
    A, B = bench.random_hermitian_window(rng, n), bench.random_hermitian_window(rng, n)
    HA, HB = random_hermitian(rng, n), random_hermitian(rng, n)
    return A, A + eps * HA / schatten_1(HA), B, B + eps * HB / schatten_1(HB)


def test_ensemble_window_and_ranks():
    rng = np.random.default_rng(0)
    H = bench.random_hermitian_window(rng, 10)
    lam = np.linalg.eigvalsh(H)
    assert lam[0] == pytest.approx(-bench.SPECTRAL_WINDOW) and lam[-1] == pytest.approx(bench.SPECTRAL_WINDOW)
    assert np.linalg.matrix_rank(bench.random_low_rank_hermitian(rng, 8, 2)) == 2
    assert bench.perturbation_ranks(16) == (1, 4, 16)


def test_constant_f_gives_zero_ratio():
    rec = bench.lipschitz_trial(TrigPoly2D.constant(1.0), *perturbed(1), besov=1.0)
    assert rec.df_s1 <= 1e-13 and rec.ratio <= 1e-12


def test_coordinate_f_exact_identity():
    A1, A2, B1, B2 = perturbed(2)
    besov = 1.7
    rec = bench.lipschitz_trial(X_COORD, A1, A2, B1, B2, besov=besov)
    assert rec.df_s1 == pytest.approx(schatten_1(A1 - A2), rel=1e-9)
    assert rec.ratio == pytest.approx(rec.dA_s1 / ((rec.dA_s1 + rec.dB_s1) * besov), rel=1e-9)
    assert rec.ratio <= 1 / besov
    assert rec.split_residual <= 1e-9


def test_trace_records_are_consistent():
    rep = bench.run_lipschitz_trace(9, 8, 4, seed=3)
    assert [t.seed for t in rep.trials] == list(range(3, 12))
    assert [t.rank for t in rep.trials] == [1, 2, 8] * 3
    for t in rep.trials:
        assert np.isfinite(t.row()[4:]).all()
        assert t.ratio == pytest.approx(t.df_s1 / ((t.dA_s1 + t.dB_s1) * t.besov), rel=1e-12)
        assert t.dA_s1 == pytest.approx(t.eps, rel=1e-9) and t.dB_s1 == pytest.approx(t.eps, rel=1e-9)
        assert t.split_residual <= 1e-8
    assert rep.max_ratio == max(t.ratio for t in rep.trials)


def test_empty_report():
    rep = bench.run_lipschitz_trace(0, 8, 4)
    assert rep.trials == () and rep.max_ratio == 0.0 and rep.max_split_residual == 0.0


def test_trace_determinism_and_workers():
    a = bench.run_lipschitz_trace(6, 8, 3, seed=11)
    b = bench.run_lipschitz_trace(6, 8, 3, seed=11, workers=3)
    assert [t.row() for t in a.trials] == [t.row() for t in b.trials]


def test_desk_scale_limits():
    with pytest.raises(ValueError):
        bench.run_lipschitz_trace(1, 65, 2)
    with pytest.raises(ValueError):
        bench.run_lipschitz_trace(1, 8, 17)


def test_ratio_invariant_under_unitary_conjugation():
    s = bench._setup(5, 0, 6, 4, bench.SPECTRAL_WINDOW)
    eps = 1e-2
    ops = (s.A, s.A + eps * s.HA, s.B, s.B + eps * s.HB)
    W = random_unitary(np.random.default_rng(9), 6)
    a = bench.lipschitz_trial(s.f, *ops, besov=s.besov)
    b = bench.lipschitz_trial(s.f, *(W @ M @ W.conj().T for M in ops), besov=s.besov)
    assert b.ratio == pytest.approx(a.ratio, rel=1e-9)


def test_small_sweep_is_stable():
    sweep = bench.run_lipschitz_sweep(30, 8, 4, seed=0)
    ratios = [rep.max_ratio for rep in sweep.values()]
    assert all(np.isfinite(ratios)) and max(ratios) < 2 * min(ratios)


def test_blowup_small_sizes():
    rep = bench.run_opnorm_blowup([1, 2, 4, 8])
    first, second = rep.rows[0], rep.rows[1]
    assert first.N == 1 and first.witness_ratio == 0 and first.sup_norm == 0
    assert second.witness_ratio == pytest.approx(1.0, abs=1e-12)
    assert all(r.perturbation == pytest.approx(2 * np.pi, abs=1e-10) for r in rep.rows)
    assert all(r.lipschitz_ratio == pytest.approx(r.witness_ratio / (2 * np.pi), rel=1e-9) for r in rep.rows)
    assert all(r.f_A2_B <= 1e-10 for r in rep.rows)
    assert rep.monotone and rep.growth_held
    assert len(rep.rows[0].row()) == len(bench.BlowupRow.COLUMNS)


def test_blowup_n2_dense_sampling():
    # dense sampling over contractions confirms the Schur norm of [[0,1],[0,0]] is 1
    rng = np.random.default_rng(0)
    tau = np.array([[0.0, 1.0], [0.0, 0.0]])
    best = 0.0
    for _ in range(2000):
        Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        Z /= np.linalg.norm(Z, 2)
        best = max(best, np.linalg.norm(tau * Z, 2))
    assert best <= 1 + 1e-12 and best > 0.99


def test_growth_contract_flags():
    row = lambda N, r, sup=1.0, pert=2 * np.pi: bench.BlowupRow(N, r, 0.0, sup, sup, pert, r / (2 * np.pi), 0.0)
    assert bench.BlowupReport((row(2, 1.0), row(4, 1.2))).growth_held
    assert not bench.BlowupReport((row(2, 1.0), row(4, 0.9))).growth_held
    assert not bench.BlowupReport((row(2, 1.0), row(4, 1.2, sup=2.0))).growth_held
    assert not bench.BlowupReport((row(2, 1.0), row(4, 1.2, pert=6.0))).growth_held
    assert not bench.BlowupReport((row(2, 1.0), row(4, 1.0))).growth_held


def test_doubling_sizes():
    assert bench.doubling_sizes(1) == [1]
    assert bench.doubling_sizes(20) == [1, 2, 4, 8, 16]
    with pytest.raises(ValueError):
        bench.run_opnorm_blowup([512])


def test_crossvalidation_passes():
    summary = bench.run_crossvalidation()
    assert summary.passed, [(r.name, r.residual, r.tol) for r in summary.failures()]
    assert [r.name for r in summary.results] == bench.check_names()
    assert len({r.module for r in summary.results}) >= 6


def test_crossvalidation_sensitivity():
    summary = bench.run_crossvalidation(tol_override=1e-15)
    failed = {r.name for r in summary.failures()}
    assert "sinc_expansion_vs_divided_difference" in failed
    assert all(r.module and np.isfinite(r.residual) for r in summary.failures())


def test_crossvalidation_doubled_J():
    a = {r.name: r.residual for r in bench.run_crossvalidation(J=128).results}
    b = {r.name: r.residual for r in bench.run_crossvalidation(J=256).results}
    for name, _, _, _, scales in bench.CHECKS:
        if scales:
            assert b[name] < a[name], name


def test_crossvalidation_reports_crashes(monkeypatch):
    def boom(rng, J):
        raise RuntimeError("broken")

    checks = list(bench.CHECKS)
    checks[0] = (checks[0][0], checks[0][1], checks[0][2], boom, False)
    monkeypatch.setattr(bench, "CHECKS", tuple(checks))
    summary = bench.run_crossvalidation()
    assert not summary.passed
    assert summary.failures()[0].name == checks[0][0] and summary.failures()[0].residual == np.inf
