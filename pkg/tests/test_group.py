
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kappa_fuzzy import _accel
from kappa_fuzzy.errors import DimensionError, InputError, TruncationWarning
from kappa_fuzzy.group import (ExpElement, GridFunction, HaarData, SplitElement, convolve,
                               from_split, involution, modular, phi, to_split)

coord = st.floats(-3, 3, allow_nan=False)


def split_elements(D):
    return st.builds(SplitElement, coord, arrays(float, D - 1, elements=coord))


def close(g, h, tol=1e-10):
    return abs(g.t - h.t) <= tol * max(1, abs(g.t)) and np.allclose(g.y, h.y, rtol=tol, atol=tol)


def test_product_example():
    g = SplitElement(1.0, [2.0]) * SplitElement(0.5, [-1.0])
    assert g.t == 1.5
    assert g.y[0] == pytest.approx(2 * np.exp(-0.5) - 1, abs=1e-15)
    assert SplitElement(0.3, [1.0]).inverse() == SplitElement(-0.3, [-np.exp(0.3)])


@pytest.mark.parametrize("D", [2, 3, 4])
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_associativity_and_inverse(D, data):
    g, h, k = (data.draw(split_elements(D)) for _ in range(3))
    assert close((g * h) * k, g * (h * k))
    e = SplitElement.identity(D)
    scale = 1 + np.exp(abs(g.t)) * np.max(np.abs(g.y))
    for p in (g * g.inverse(), g.inverse() * g):
        assert abs(p.t) < 1e-12 and np.max(np.abs(p.y - e.y)) <= 1e-14 * scale


@settings(max_examples=80, deadline=None)
@given(coord, arrays(float, 2, elements=coord))
def test_exp_split_roundtrip(x0, x):
    g = ExpElement(x0, x)
    back = from_split(to_split(g))
    assert abs(back.x0 - x0) <= 1e-12
    assert np.allclose(back.x, x, rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(coord, arrays(float, 1, elements=coord), coord, arrays(float, 1, elements=coord))
def test_exp_product_matches_split_product(a, b, c, d):
    g1, g2 = ExpElement(a, b), ExpElement(c, d)
    lhs = to_split(g1 * g2)
    rhs = to_split(g1) * to_split(g2)
    assert close(lhs, rhs, 1e-11)


def test_one_parameter_subgroups():
    # exp(i s X0) exp(i y X) in split coordinates is (s, y) itself
    g = to_split(ExpElement(0.7, [0.0])) * to_split(ExpElement(0.0, [1.3]))
    assert close(g, SplitElement(0.7, [1.3]), 1e-15)


def test_phi_small_argument():
    x = np.array([0.0, 1e-6, -1e-5, 1e-3, 2.0])
    ref = np.array([1.0] + [np.expm1(v) / v for v in x[1:]])
    np.testing.assert_allclose(phi(x), ref, rtol=1e-15)
    assert phi(0.0) == 1.0


def test_element_validation():
    with pytest.raises(DimensionError):
        SplitElement(0.0, [])
    with pytest.raises(InputError):
        SplitElement(np.nan, [0.0])
    with pytest.raises(DimensionError):
        SplitElement(0.0, [1.0]) * SplitElement(0.0, [1.0, 2.0])


@pytest.mark.parametrize("D", [2, 3, 4])
def test_modular_function(D):
    h = HaarData(D)
    g1, g2 = SplitElement(0.4, np.ones(D - 1)), SplitElement(-1.1, np.zeros(D - 1))
    assert modular(g1 * g2) == pytest.approx(modular(g1) * modular(g2), rel=1e-14)
    assert h.modular(0.4) == pytest.approx(np.exp(-(D - 1) * 0.4))
    assert h.right_density(0.4) * h.modular(0.4) == pytest.approx(h.left_density(0.4))


def test_left_haar_invariance_numerically():
    # int f(g0 g) dt dy = int f(g) dt dy for the left measure dt dy
    f = lambda t, y: np.exp(-4 * t ** 2 - (y - 0.3) ** 2)
    t = np.linspace(-5, 5, 801)
    y = np.linspace(-60, 60, 3001)
    T, Y = np.meshgrid(t, y, indexing="ij")
    g0t, g0y = 0.6, 0.9
    shifted = f(g0t + T, np.exp(-T) * g0y + Y)
    I0 = np.trapezoid(np.trapezoid(f(T, Y), y, axis=1), t)
    I1 = np.trapezoid(np.trapezoid(shifted, y, axis=1), t)
    assert abs(I1 - I0) < 1e-10 * I0


# ---------------------------------------------------------------------------
# group algebra
# ---------------------------------------------------------------------------

A, B, C, Dw = 0.5, 0.7, 0.6, 0.8


def _gauss(a, b):
    return lambda T, Y: np.exp(-T ** 2 / (2 * a ** 2) - Y ** 2 / (2 * b ** 2))


def _convolution_oracle(t, y):
    """Inner y' integral in closed form, outer t' integral by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(200)
    tp, wt = 6 * x, 6 * w  # t' in [-6, 6]; the a = 0.5 Gaussian is ~e^-72 there
    T, Y = np.meshgrid(t, y, indexing="ij")
    out = np.zeros(T.shape)
    for s_node, wk in zip(tp, wt):
        s = np.exp(s_node - T)
        Aq = 1 / (2 * B ** 2) + s ** 2 / (2 * Dw ** 2)
        Bq = s * Y / Dw ** 2
        Cq = Y ** 2 / (2 * Dw ** 2)
        inner = np.sqrt(np.pi / Aq) * np.exp(Bq ** 2 / (4 * Aq) - Cq)
        out += wk * np.exp(-s_node ** 2 / (2 * A ** 2)) * np.exp(-(T - s_node) ** 2 / (2 * C ** 2)) * inner
    return out


def _pair(m):
    t = np.linspace(-4.5, 4.5, m)
    y = np.linspace(-7, 7, m)
    return GridFunction.sample(_gauss(A, B), t, y), GridFunction.sample(_gauss(C, Dw), t, y)


def test_convolution_against_semianalytic_oracle():
    f1, f2 = _pair(128)
    h = convolve(f1, f2)
    ref = _convolution_oracle(f1.t, f1.y[0])
    err = np.linalg.norm(h.values - ref) / np.linalg.norm(ref)
    assert err < 1e-4
    assert h.truncation < 1e-8


def test_convolution_backends_agree():
    f1, f2 = _pair(32)
    with _accel.use_backend("numpy"):
        a = convolve(f1, f2).values
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    with _accel.use_backend("numba"):
        b = convolve(f1, f2).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(a))


def test_convolution_warns_on_truncated_support():
    t = np.linspace(-1, 1, 16)
    f = GridFunction.sample(_gauss(1.0, 1.0), t, t)
    with pytest.warns(TruncationWarning):
        h = convolve(f, f)
    assert h.truncation > 0.1


def test_convolution_needs_shared_grid():
    f1, _ = _pair(16)
    other = GridFunction.sample(_gauss(A, B), f1.t + 0.1, f1.y[0])
    with pytest.raises(DimensionError):
        convolve(f1, other)


def _narrow_pair(m):
    t = np.linspace(-3, 3, m)
    y = np.linspace(-6, 6, m)
    f1 = GridFunction.sample(lambda T, Y: np.exp(-T ** 2 / 0.15 - (Y - 0.3) ** 2 / 0.5), t, y)
    f2 = GridFunction.sample(lambda T, Y: np.exp(-(T - 0.1) ** 2 / 0.2 - Y ** 2 / 0.6 + 0.5j * Y), t, y)
    return f1, f2


def _star_identity_error(m, sign):
    f1, f2 = _narrow_pair(m)
    lhs = involution(convolve(f1, f2), modular_sign=sign)
    rhs = convolve(involution(f2, modular_sign=sign), involution(f1, modular_sign=sign))
    return np.linalg.norm(lhs.values - rhs.values) / np.linalg.norm(lhs.values)


@pytest.mark.filterwarnings("ignore::kappa_fuzzy.errors.TruncationWarning")
def test_involution_is_antihomomorphic():
    errs = [_star_identity_error(m, -1) for m in (64, 128)]
    assert errs[1] < 1e-4
    assert errs[1] < errs[0] / 8


def test_involution_example_formula():
    t = np.linspace(-3, 3, 61)
    f1, _ = _narrow_pair(61)
    fs = involution(f1)
    T, Y = np.meshgrid(t, f1.y[0], indexing="ij")
    ref = np.exp(-T ** 2 / 0.15 - (-np.exp(T) * Y - 0.3) ** 2 / 0.5) * np.exp(T)
    core = np.abs(np.exp(T) * Y) < 5
    assert np.max(np.abs(fs.values - ref)[core]) < 1e-2


def test_modular_sign_is_pinned_by_l1_isometry():
    # The anti-homomorphism identity holds for any character in place of Delta,
    # so the sign is fixed by the isometry  int |f*| dmu_L = int |f| dmu_L.
    f1, _ = _narrow_pair(128)
    n0 = np.sum(np.abs(f1.values))
    good = np.sum(np.abs(involution(f1).values)) / n0
    bad = np.sum(np.abs(involution(f1, modular_sign=1).values)) / n0
    assert abs(good - 1) < 1e-5
    assert abs(bad - 1) > 0.1


def test_involution_is_an_involution():
    t = np.linspace(-3, 3, 96)
    f = GridFunction.sample(lambda T, Y: np.exp(-T ** 2 - Y ** 2) * (1 + 0.3j * T), t, t)
    ff = involution(involution(f))
    core = (np.abs(t)[:, None] < 1) & (np.abs(t)[None, :] < 1)
    assert np.max(np.abs(ff.values - f.values)[core]) < 1e-3


def test_grid_function_validation():
    t = np.linspace(0, 1, 8)
    with pytest.raises(DimensionError):
        GridFunction(t, (t,), np.zeros((8, 7)))
    with pytest.raises(DimensionError):
        GridFunction(t[:3], (t[:3],), np.zeros((3, 3)))
    with pytest.raises(DimensionError):
        GridFunction(t ** 2, (t,), np.zeros((8, 8)))


def test_grid_function_csv_roundtrip(tmp_path):
    t = np.linspace(-1, 1, 9)
    y1 = np.linspace(0, 2, 5)
    y2 = np.linspace(-3, 3, 4)
    f = GridFunction.sample(lambda T, Y1, Y2: np.exp(1j * T) * Y1 - Y2 / 3, t, y1, y2)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    g = GridFunction.from_csv(path)
    assert g.D == 3
    np.testing.assert_array_equal(g.values, f.values)
    np.testing.assert_array_equal(g.y[1], y2)
    assert g.header() == f.header()


def test_integral_and_norm():
    t = np.linspace(-10, 10, 401)
    f = GridFunction.sample(lambda T, Y: np.exp(-(T ** 2 + Y ** 2) / 2), t, t)
    assert f.integral().real == pytest.approx(2 * np.pi, rel=1e-12)
    assert f.l2_norm() == pytest.approx(np.sqrt(np.pi), rel=1e-12)
    w = f.integral(lambda T, Y: np.exp(T))
    assert w.real == pytest.approx(2 * np.pi * np.exp(0.5), rel=1e-10)
