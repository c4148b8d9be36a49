import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import rel
from ncfuncalc.doi import eval_f_AB
from ncfuncalc.functions2d import Elementary2D, TrigPoly2D, random_trig_poly
from ncfuncalc.linalg import random_hermitian, schatten_1
from ncfuncalc.sincrep import (
    BandError,
    CoverageError,
    DividedDifferenceKernel,
    divided_difference,
    expand_divided_difference,
    gamma_matrix,
    partition_deficit,
    perturbation_formula_A,
    perturbation_formula_B,
    required_J,
    sinc_basis,
    sinc_haagerup_rep,
    sinc_matrix,
)
from ncfuncalc.toi import s1_bound_check, toi_haagerup

seeds = st.integers(0, 2**32 - 1)
SIN_X = TrigPoly2D(1.0, {(1, 0): -0.5j, (-1, 0): 0.5j})
X_COORD = Elementary2D(lambda x, y: x + 0 * y, lambda x, y: np.ones(np.broadcast(x, y).shape), lambda x, y: np.zeros(np.broadcast(x, y).shape))
Y_COORD = X_COORD.swap()


def band1(rng, real=False):
    return random_trig_poly(rng, 3, omega=1 / 3, band=1.0, real=real)


def window_hermitian(rng, n, r=3.0):
    H = random_hermitian(rng, n)
    return r * H / np.abs(np.linalg.eigvalsh(H)).max()


def test_sinc_basis_lattice_values():
    for h in (np.pi, 1.0, 2.5):
        j = np.arange(-5, 6)
        assert np.all(sinc_basis(j * h, j, h) == 1.0)
        S = sinc_matrix(j * h, 5, h)
        assert np.allclose(S, np.eye(11), atol=1e-15)


def test_partition_deficit_rate():
    x = np.linspace(-10, 10, 2001)
    d = partition_deficit(x, 200)
    assert d.max() <= 2 / (np.pi * 200)
    assert d.min() >= -1e-12


def test_partition_deficit_decreases_in_J():
    x = np.linspace(-10, 10, 81)
    ds = np.array([partition_deficit(x, J) for J in (20, 40, 80, 160, 320)])
    # strictly decreasing except at lattice points, where the deficit is 0
    on_lattice = np.isclose(x / np.pi, np.round(x / np.pi))
    assert np.all(np.diff(ds[:, ~on_lattice], axis=0) < 0)
    assert np.all(np.abs(ds[:, on_lattice]) <= 1e-15)


def test_gamma_constant_is_zero():
    G = gamma_matrix(TrigPoly2D.constant(3.0), 0.4, 10)
    assert np.all(G == 0)


def test_gamma_of_sine():
    G, norm = gamma_matrix(SIN_X, 0.3, 12, with_norm=True)
    j = np.arange(-12, 13)
    off = G - np.diag(np.diag(G))
    assert np.abs(off).max() <= 1e-14  # sin(j pi) rounding
    assert np.allclose(np.diag(G), (-1.0) ** j, atol=1e-15)
    assert norm == pytest.approx(1.0, abs=1e-14)


def test_band_violation_rejected():
    f = TrigPoly2D(1.0, {(2, 0): 1.0})
    with pytest.raises(BandError):
        gamma_matrix(f, 0.0, 5)
    with pytest.raises(BandError):
        expand_divided_difference(f, 0.1, 0.2, 0.3)
    with pytest.raises(BandError):
        sinc_haagerup_rep(f, 1.0, 8)
    gamma_matrix(f, 0.0, 5, h=np.pi / 2)  # fine once the grid is refined


def test_gamma_norm_constant_stable_in_J():
    rng = np.random.default_rng(0)
    ys = np.linspace(-10, 10, 9)
    ratios = {J: [] for J in (32, 64, 128)}
    for _ in range(20):
        f = band1(rng)
        sup = f.sup_norm_estimate().lower
        for J in ratios:
            _, norms = gamma_matrix(f, ys, J, with_norm=True)
            ratios[J].append(norms.max() / sup)
    C = {J: max(v) for J, v in ratios.items()}
    assert max(C.values()) <= 2 * min(C.values())
    assert max(C.values()) < 10


def test_expand_collocation():
    rng = np.random.default_rng(1)
    f = band1(rng)
    for j in (-3, 0, 2, 7):
        val = expand_divided_difference(f, j * np.pi, j * np.pi, 0.5, J=8)
        assert abs(val - f.partial_x(j * np.pi, 0.5)) <= 1e-14 * (1 + abs(val))


@given(seed=seeds)
def test_lattice_exactness(seed):
    rng = np.random.default_rng(seed)
    f = band1(rng)
    j, k = rng.integers(-6, 7, 2)
    y = rng.uniform(-5, 5)
    G = gamma_matrix(f, y, 8)
    val = expand_divided_difference(f, j * np.pi, k * np.pi, y, J=8)
    assert abs(val - G[j + 8, k + 8]) <= 1e-13


def test_expand_sine_converges_to_two_over_pi():
    errs = [abs(expand_divided_difference(SIN_X, np.pi / 2, -np.pi / 2, 0.0, J=J) - 2 / np.pi) for J in (16, 64, 256)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-3


def test_expand_random_points():
    rng = np.random.default_rng(2)
    for _ in range(3):
        f = band1(rng)
        pts = rng.uniform(-5, 5, (3, 100))
        exact = divided_difference(f, *pts)
        errs = [np.abs(expand_divided_difference(f, *pts, J=J) - exact).max() for J in (64, 128, 256)]
        assert errs[2] <= 1e-3
        assert errs[0] > errs[1] > errs[2]


@given(seed=seeds, J=st.integers(1, 40))
def test_expand_matches_explicit_gamma_contraction(seed, J):
    rng = np.random.default_rng(seed)
    f = band1(rng)
    x1, x2, y = rng.uniform(-8, 8, (3, 7))
    y[3] = y[0]  # repeated y values share one Gamma column
    G = gamma_matrix(f, y, J)
    ref = np.einsum("ji,jki,ki->i", sinc_matrix(x1, J), G, sinc_matrix(x2, J))
    assert np.abs(expand_divided_difference(f, x1, x2, y, J=J) - ref).max() <= 1e-13


@given(seed=seeds)
def test_divided_difference_symmetry_and_diagonal(seed):
    rng = np.random.default_rng(seed)
    f = band1(rng)
    x1, x2, y = rng.uniform(-5, 5, (3, 10))
    assert np.abs(divided_difference(f, x1, x2, y) - divided_difference(f, x2, x1, y)).max() <= 1e-12
    assert np.abs(divided_difference(f, x1, x1, y) - f.partial_x(x1, y)).max() == 0
    fy = divided_difference(f, x1, x2, y, axis="y")
    assert np.abs(fy - (f(y, x1) - f(y, x2)) / (x1 - x2)).max() <= 1e-12
    assert np.abs(expand_divided_difference(f, x1, x2, y, J=32) - expand_divided_difference(f, x2, x1, y, J=32)).max() <= 1e-12


def test_gamma_real_symmetric_for_real_f():
    f = band1(np.random.default_rng(3), real=True)
    G = gamma_matrix(f, 0.7, 20)
    assert np.abs(G.imag).max() <= 1e-15
    assert np.abs(G - G.T).max() <= 1e-12


def test_kernel_tensor_matches_pointwise():
    rng = np.random.default_rng(4)
    f = band1(rng)
    l, m, n = rng.uniform(-3, 3, 4), rng.uniform(-3, 3, 5), rng.uniform(-3, 3, 3)
    l[1] = m[2]  # exercise the diagonal branch
    for axis in ("x", "y"):
        if axis == "y":
            m[0] = n[1]
        k = DividedDifferenceKernel.of(f, axis)
        brute = k.func(l[:, None, None], m[None, :, None], n[None, None, :])
        assert np.abs(k.tensor(l, m, n) - brute).max() <= 1e-13


def test_rep_dilation_consistency():
    rng = np.random.default_rng(5)
    f = band1(rng)
    g = f.dilate(0.5)  # g(x, y) = f(x/2, y/2), band 1/2
    rep_g = sinc_haagerup_rep(g, 0.5, 16, with_bounds=False)
    rep_f = sinc_haagerup_rep(f, 1.0, 16, with_bounds=False)
    x = rng.uniform(-6, 6, 7)
    # grid step doubles: sinc factors agree after halving the argument
    assert np.abs(rep_g.alphas(x) - rep_f.alphas(x / 2)).max() <= 1e-15
    # difference quotients pick up the chain-rule factor 1/2
    assert np.abs(rep_g.gammas(x) - 0.5 * rep_f.gammas(x / 2)).max() <= 1e-14


def test_rep_l2_normalization():
    J = 64
    rep = sinc_haagerup_rep(band1(np.random.default_rng(6)), 1.0, J, with_bounds=False)
    x = np.linspace(-10, 10, 401)
    s = (rep.alphas(x) ** 2).sum(axis=0)
    assert np.all(s <= 1 + 1e-12) and np.all(s >= 1 - 2 / (np.pi * J))


def test_rep_reproduces_expansion_through_toi():
    rng = np.random.default_rng(7)
    f = band1(rng)
    J = 32
    rep = sinc_haagerup_rep(f, 1.0, J, with_bounds=False)
    for _ in range(5):
        x1, x2, y = rng.uniform(-5, 5, 3)
        W = toi_haagerup(rep, np.array([[x1]]), np.eye(1), np.array([[x2]]), np.eye(1), np.array([[y]]))
        assert abs(W[0, 0] - expand_divided_difference(f, x1, x2, y, J=J)) <= 1e-13


def test_rep_shapes_and_bounds():
    f = band1(np.random.default_rng(8))
    rx = sinc_haagerup_rep(f, 1.0, 16, y_samples=np.linspace(-5, 5, 11))
    ry = sinc_haagerup_rep(f, 1.0, 16, axis="y", y_samples=np.linspace(-5, 5, 11))
    assert rx.shape == "vec-vec-mat" and ry.shape == "mat-vec-vec"
    assert rx.bounds[:2] == (1.0, 1.0) and ry.bounds[1:] == (1.0, 1.0)
    with pytest.raises(ValueError):
        sinc_haagerup_rep(f, 1.0, 16, axis="z")


def test_rep_bound_scales_with_sigma():
    # bound / (sigma * sup|f|) measured over seeded instances and sigma
    rng = np.random.default_rng(9)
    consts = []
    for _ in range(10):
        f = band1(rng)
        sup = f.sup_norm_estimate().upper
        for sigma in (1.0, 2.0, 4.0):
            rep = sinc_haagerup_rep(f, sigma, 64, y_samples=np.linspace(-10, 10, 21))
            consts.append(rep.bounds[2] / (sigma * sup))
    assert max(consts) < 5


def test_perturbation_trivial_cases():
    rng = np.random.default_rng(10)
    f = band1(rng)
    A1, A2, B = (window_hermitian(rng, 5) for _ in range(3))
    assert np.abs(perturbation_formula_A(f, A1, A1, B)).max() <= 1e-14
    assert np.abs(perturbation_formula_B(f, A1, B, B)).max() <= 1e-14
    assert rel(perturbation_formula_A(X_COORD, A1, A2, B), A1 - A2) <= 1e-12
    assert rel(perturbation_formula_B(Y_COORD, A1, A2, B), A2 - B) <= 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_perturbation_exact_matches_doi(seed):
    rng = np.random.default_rng(seed)
    f = band1(rng)
    A1, B1 = window_hermitian(rng, 6), window_hermitian(rng, 6)
    A2 = A1 + 0.1 * random_hermitian(rng, 6)
    B2 = B1 + 0.1 * random_hermitian(rng, 6)
    refA = eval_f_AB(f, A1, B1).value - eval_f_AB(f, A2, B1).value
    refB = eval_f_AB(f, A1, B1).value - eval_f_AB(f, A1, B2).value
    assert rel(perturbation_formula_A(f, A1, A2, B1), refA) <= 1e-8
    assert rel(perturbation_formula_B(f, A1, B1, B2), refB) <= 1e-8


def test_perturbation_sinc_converges():
    rng = np.random.default_rng(11)
    f = band1(rng)
    A1, B = window_hermitian(rng, 6), window_hermitian(rng, 6)
    A2 = A1 + 0.1 * random_hermitian(rng, 6)
    ref = eval_f_AB(f, A1, B).value - eval_f_AB(f, A2, B).value
    errs = [rel(perturbation_formula_A(f, A1, A2, B, J=J, method="sinc"), ref) for J in (32, 64, 128, 256)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-3
    refB = eval_f_AB(f, B, A1).value - eval_f_AB(f, B, A2).value
    assert rel(perturbation_formula_B(f, B, A1, A2, J=256, method="sinc"), refB) <= 1e-3


def test_coverage_error_reports_required_J():
    rng = np.random.default_rng(12)
    f = band1(rng)
    A = 50 * window_hermitian(rng, 4, 1.0)
    with pytest.raises(CoverageError) as info:
        perturbation_formula_A(f, A, A, A, J=16, method="sinc")
    need = info.value.required_J
    assert need == required_J([np.linalg.eigvalsh(A)], np.pi / 1.5)
    perturbation_formula_A(f, A, A, A, J=need, method="sinc")
    with pytest.raises(ValueError):
        perturbation_formula_A(f, A, A, A, method="magic")


@pytest.mark.parametrize("seed", range(10))
def test_trace_norm_transfer(seed):
    rng = np.random.default_rng(100 + seed)
    f = band1(rng)
    A1, B = window_hermitian(rng, 5), window_hermitian(rng, 5)
    A2 = A1 + 0.2 * random_hermitian(rng, 5)
    rep = sinc_haagerup_rep(f, 1.5, 64, y_samples=np.linalg.eigvalsh(B))
    lhs = schatten_1(perturbation_formula_A(f, A1, A2, B))
    assert lhs <= rep.bounds[2] * schatten_1(A1 - A2) * (1 + 1e-6)
    # the same inequality for the sinc-represented integral itself
    l, r = s1_bound_check(rep, A1, A1 - A2, A2, np.eye(5), B)
    assert l <= r * (1 + 1e-9)
