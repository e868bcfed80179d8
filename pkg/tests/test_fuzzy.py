import json

import numpy as np
import pytest

from kappa_fuzzy.errors import (ConditioningWarning, DimensionError, InputError, MemoryGuardError,
                                PreconditionError, TruncationWarning)
from kappa_fuzzy.fuzzy import (CoherentFamily, InitialState, ad, b_operator, coherent_state,
                               comder_check, convergence_order, dequantize, fuzzy_laplacian,
                               group_action, laplacian_action, mode_compare, quantize_ls,
                               radial_deviation, spectral_report, star)
from kappa_fuzzy.group import GridFunction, SplitElement
from kappa_fuzzy.numerics import eig_general
from kappa_fuzzy.representation import (GridRealization, OscillatorTruncation, jordan_schwinger,
                                        l0f_operators)


def _osc_family(N=16, nt=21, ny=31, lam=(1.0,)):
    osc = OscillatorTruncation(N)
    ops = jordan_schwinger(osc, list(lam))
    ys = tuple(np.linspace(-1, 1, ny) for _ in lam)
    return CoherentFamily(InitialState.oscillator_ground(osc), ops, np.linspace(-1, 1, nt), ys)


def _random_matrix(n, seed):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


@pytest.fixture(scope="module")
def osc_family():
    return _osc_family()


@pytest.fixture(scope="module")
def k_family():
    grid = GridRealization("k-space", 6.0, 128)
    ops = l0f_operators(grid)
    st = InitialState.gaussian(grid, 0.0, 0.5)
    return CoherentFamily(st, ops, np.linspace(-1, 1, 5), (np.linspace(-1, 1, 5),))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


def test_family_states_are_unit_vectors(osc_family):
    assert osc_family.states.shape == (21, 31, 16)
    np.testing.assert_allclose(np.linalg.norm(osc_family.states, axis=-1), 1, atol=1e-12)
    assert osc_family.weights[0, 0] == pytest.approx(0.1 * (2 / 30))


def test_family_matches_direct_evaluation(osc_family):
    i, j = 7, 20
    direct = coherent_state(osc_family, osc_family.t[i], osc_family.y[0][j])
    assert np.max(np.abs(direct - osc_family.states[i, j])) < 1e-12


def test_coherent_state_outside_window_warns(osc_family):
    with pytest.warns(TruncationWarning):
        coherent_state(osc_family, 3.0, [0.0])
    with pytest.raises(DimensionError):
        coherent_state(osc_family, 0.0, [0.0, 1.0])


def test_initial_state_validation():
    osc = OscillatorTruncation(4)
    with pytest.raises(PreconditionError):
        InitialState(osc, np.ones(4), {})
    with pytest.raises(DimensionError):
        InitialState(osc, np.ones(3) / np.sqrt(3), {})
    grid = GridRealization("k-space", 4.0, 16, D=3)
    v = np.zeros(grid.dim, complex)
    v[1] = 1
    with pytest.raises(PreconditionError):
        InitialState(grid, v, {}, radial=True)
    with pytest.raises(InputError):
        InitialState.gaussian(grid, 0.0, -1.0)


def test_radial_gaussian():
    grid = GridRealization("k-space", 4.0, 16, D=3, orthants="all")
    st = InitialState.gaussian(grid, 0.2, 0.5)
    assert st.radial and radial_deviation(st) == 0.0
    assert 0.2 < st.support_extent() < 4.0


def test_grid_covariance_of_coherent_states(k_family):
    # U(g) c(h) = c(g h) for the exact grid action
    g = SplitElement(0.2, [0.3])
    h = SplitElement(-0.4, [0.5])
    gh = g * h
    lhs = group_action(k_family, g, coherent_state(k_family, h.t, h.y))
    rhs = coherent_state(k_family, gh.t, gh.y)
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_oscillator_time_flow_composes(osc_family):
    c = coherent_state(osc_family, 0.3, [0.2])
    lhs = group_action(osc_family, SplitElement(0.4, [0.0]), c)
    assert np.max(np.abs(lhs - coherent_state(osc_family, 0.7, [0.2]))) < 1e-12


# ---------------------------------------------------------------------------
# dequantization and star product
# ---------------------------------------------------------------------------


def test_unit_dequantizes_to_one(osc_family):
    f = dequantize(np.eye(16), osc_family)
    assert isinstance(f, GridFunction)
    assert np.max(np.abs(f.values - 1)) < 1e-13


def test_adjoint_goes_to_conjugation(osc_family):
    F = _random_matrix(16, 1)
    lhs = dequantize(F.conj().T, osc_family).values
    rhs = np.conj(dequantize(F, osc_family).values)
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)) <= 1e-13


def test_star_product_is_associative(osc_family):
    A, B, C = (_random_matrix(16, s) for s in (2, 3, 4))
    lhs = star(A @ B, C, osc_family).values
    rhs = star(A, B @ C, osc_family).values
    assert np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)) <= 1e-12
    with pytest.raises(DimensionError):
        star(np.eye(3), np.eye(16), osc_family)


def test_small_lattice_returns_raw_samples():
    fam = _osc_family(8, nt=3, ny=2)
    out = dequantize(np.eye(8), fam)
    assert isinstance(out, np.ndarray) and out.shape == (3, 2)


def test_quantize_round_trip(osc_family):
    F0 = np.zeros((16, 16), complex)
    F0[:4, :4] = _random_matrix(4, 5)
    f = dequantize(F0, osc_family)
    res = quantize_ls(f, osc_family, basis=4)
    assert res.relative_residual <= 1e-6
    assert res.truncated == 0
    assert np.max(np.abs(res.F - F0)) / np.max(np.abs(F0)) < 1e-6


def test_quantize_rank_deficient_warns(osc_family):
    f = dequantize(np.eye(16), osc_family)
    with pytest.warns(ConditioningWarning):
        res = quantize_ls(f, osc_family, basis=16, rcond=1e-6)
    assert res.truncated > 0
    with pytest.raises(PreconditionError):
        quantize_ls(np.zeros((3, 3)), _osc_family(8, nt=3, ny=3), basis=8)


# ---------------------------------------------------------------------------
# derivative identities
# ---------------------------------------------------------------------------


def _gaussian_projector(grid):
    psi = np.exp(-(grid.s - 0.3) ** 2 / (2 * 0.4 ** 2)).astype(complex)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def test_comder_exact_for_generator(k_family):
    rep = comder_check(k_family.ops.Xk[0], k_family, h=1e-3)
    assert rep.max_deviation < 1e-9


def test_comder_gaussian_projector(k_family):
    F = _gaussian_projector(k_family.initial.realization)
    assert comder_check(F, k_family, h=1e-3).max_deviation <= 1e-4
    steps = [0.2, 0.1, 0.05]
    errs = [comder_check(F, k_family, h=h).max_deviation for h in steps]
    orders = convergence_order(errs, steps)
    assert all(3.5 <= p <= 4.5 for p in orders)


def test_comder_time_identity_holds_for_truncated_oscillator():
    fam = _osc_family(12, nt=5, ny=5)
    rep = comder_check(_random_matrix(12, 6), fam, h=1e-3)
    assert rep.deviations[0] < 1e-9


def test_comder_validation(k_family):
    with pytest.raises(InputError):
        comder_check(np.eye(k_family.dim), k_family, accuracy=3)
    with pytest.raises(InputError):
        comder_check(np.eye(k_family.dim), k_family, h=2.0)


# ---------------------------------------------------------------------------
# overcompleteness operator
# ---------------------------------------------------------------------------


def _b_report(window, spacing=0.1):
    grid = GridRealization("k-space", 6.0, 64, orthants="all")
    ops = l0f_operators(grid)
    st = InitialState.gaussian(grid, 0.0, 0.5)
    n = int(round(window / spacing))
    ax = np.linspace(-window, window, 2 * n + 1)
    return b_operator(CoherentFamily(st, ops, ax, (ax,)))


def test_b_operator_sectors_and_window_doubling():
    reports = [_b_report(W) for W in (1.0, 2.0, 4.0)]
    ratios = [r.offdiag_ratio for r in reports]
    assert ratios[0] > ratios[1] > ratios[2]
    for r in reports:
        assert r.complement_weight <= 1e-3
        assert r.selected == 0
        np.testing.assert_allclose(r.B, r.B.conj().T)


def test_b_operator_radial_state_d3():
    grid = GridRealization("k-space", 4.0, 16, D=3, orthants="all")
    st = InitialState.gaussian(grid, 0.0, 0.5)
    ax = np.linspace(-1, 1, 11)
    rep = b_operator(CoherentFamily(st, l0f_operators(grid), ax, (ax, ax)))
    assert rep.complement_weight <= 1e-3
    assert rep.trace > 0


def test_b_operator_aliasing_warning():
    with pytest.warns(ConditioningWarning):
        _b_report(1.0, spacing=0.5)


def test_b_operator_needs_k_space(osc_family):
    with pytest.raises(PreconditionError):
        b_operator(osc_family)


# ---------------------------------------------------------------------------
# fuzzy Laplacian
# ---------------------------------------------------------------------------


def test_ad_matches_commutator():
    A, F = _random_matrix(5, 7), _random_matrix(5, 8)
    np.testing.assert_allclose(ad(A) @ F.ravel(), (A @ F - F @ A).ravel(), atol=1e-12)


@pytest.mark.parametrize("lam", [(1.0,), (0.8, 0.6)])
def test_superoperator_matches_action(lam):
    ops = jordan_schwinger(OscillatorTruncation(6), list(lam))
    F = _random_matrix(6, 9)
    L = fuzzy_laplacian(ops)
    np.testing.assert_allclose(L @ F.ravel(), laplacian_action(ops, F).ravel(), atol=1e-10)
    assert np.max(np.abs(L @ np.eye(6).ravel())) < 1e-12


def test_superoperator_structure():
    ops = jordan_schwinger(OscillatorTruncation(6), [1.0])
    A0 = ad(ops.X0)
    S = A0 @ A0
    np.testing.assert_allclose(S, S.conj().T, atol=1e-12)
    assert np.min(np.linalg.eigvalsh(S)) > -1e-10
    L = fuzzy_laplacian(ops)
    assert np.max(np.abs(L - L.conj().T)) > 0.1  # the first-order term breaks Hermiticity
    np.testing.assert_allclose(fuzzy_laplacian(ops, mu2=0.5) - L, 0.5 * np.eye(36), atol=1e-14)


def test_superoperator_spectrum_against_brute_force():
    ops = jordan_schwinger(OscillatorTruncation(16), [1.0])
    L = fuzzy_laplacian(ops)
    eig = eig_general(L)
    R = L @ eig.vectors - eig.vectors * eig.eigenvalues
    rel = np.linalg.norm(R, axis=0) / (np.linalg.norm(L, 2) * np.linalg.norm(eig.vectors, axis=0))
    assert np.max(rel) < 1e-8
    ref = np.linalg.eigvals(L)
    for w in eig.eigenvalues:
        assert np.min(np.abs(ref - w)) < 1e-6 * max(1.0, abs(w))


def test_memory_guard_and_dimension():
    ops = jordan_schwinger(OscillatorTruncation(65), [1.0])
    with pytest.raises(MemoryGuardError):
        fuzzy_laplacian(ops)
    small = jordan_schwinger(OscillatorTruncation(4), [1.0])
    with pytest.raises(DimensionError):
        fuzzy_laplacian(small, D=3)
    with pytest.raises(MemoryGuardError):
        fuzzy_laplacian(small, max_dim=8)


def test_mode_compare_report(tmp_path):
    fam = _osc_family(8, nt=21, ny=31)
    rep = spectral_report(fam.ops, fam, n_modes=6, config={"N": 8})
    assert rep.N == 8 and rep.D == 2 and len(rep.modes) == 6
    for m in rep.modes:
        assert 0.0 <= m.overlap <= 1.0 + 1e-12
        assert m.kind in (1, 2)
        assert abs(m.eigenvalue + m.mu2) < 1e-15
    assert rep.best_overlap == max(m.overlap for m in rep.modes)
    assert rep.best_residual == min(m.residual for m in rep.modes)
    d = rep.to_dict()
    json.dumps(d)
    assert len(d["eigenvalues"]) == 64
    assert "commutator_deviation" in rep.truncation
    path = tmp_path / "rep.json"
    rep.to_json(path)
    assert json.loads(path.read_text())["N"] == 8
    files = rep.write_mode_tables(tmp_path)
    assert len(files) == 6
    data = np.loadtxt(files[0], delimiter=",", skiprows=1)
    assert data.shape == (21 * 31, 6)


def test_mode_compare_skips_identity():
    fam = _osc_family(6, nt=11, ny=11)
    L = fuzzy_laplacian(fam.ops)
    eig = eig_general(L)
    rep = mode_compare(eig, fam, n_modes=36)
    for m in rep.modes:
        F = eig.vectors[:, m.index].reshape(6, 6)
        rest = F - np.trace(F) / 6 * np.eye(6)
        assert np.linalg.norm(rest) > 1e-6 * np.linalg.norm(F)


def test_dequantized_classical_mode_match_is_scale_invariant():
    # overlap is a normalized inner product: scaling the eigenvector changes nothing
    fam = _osc_family(8, nt=21, ny=31)
    eig = eig_general(fuzzy_laplacian(fam.ops))
    a = mode_compare((eig.eigenvalues, eig.vectors), fam, n_modes=3)
    b = mode_compare((eig.eigenvalues, 3j * eig.vectors), fam, n_modes=3)
    for m1, m2 in zip(a.modes, b.modes):
        assert m1.overlap == pytest.approx(m2.overlap, abs=1e-12)
