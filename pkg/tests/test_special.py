import math

import mpmath
import numpy as np
import pytest
import scipy.special as sps
from hypothesis import given, settings
from hypothesis import strategies as st

from kappa_fuzzy import _accel
from kappa_fuzzy.errors import DegenerateOrderError, PoleError, RangeError
from kappa_fuzzy.special import (BesselOrder, bessel_j, bessel_j_derivative, gamma_complex, hankel,
                                 hankel_derivative, rgamma)

SWEEP_NU = [0.3, 0.5, 1.7, 0.4j]
SWEEP_X = np.linspace(0.1, 20.0, 60)


def test_gamma_examples():
    assert abs(gamma_complex(1) - 1) < 1e-15
    assert abs(gamma_complex(0.5) - math.sqrt(math.pi)) < 1e-14
    z = 0.3 + 0.7j
    assert abs(gamma_complex(z + 1) - z * gamma_complex(z)) < 1e-13 * abs(gamma_complex(z + 1))


@pytest.mark.parametrize("z", [0.1 + 0.2j, -2.5 + 0.3j, 7.3 - 4j, 0.4j, -10.7, 21.2 + 1j])
def test_gamma_against_mpmath(z):
    ref = complex(mpmath.gamma(z))
    assert abs(gamma_complex(z) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("z", [0, -1, -7])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        gamma_complex(z)
    assert rgamma(z) == 0


def test_bessel_examples():
    assert abs(bessel_j(0.5, math.pi / 2) - 2 / math.pi) < 1e-15
    assert abs(bessel_j(0, 1.0) - 0.7651976865579666) < 1e-15
    nu, x = 0.3, 3.3
    r = bessel_j(nu - 1, x) + bessel_j(nu + 1, x) - 2 * nu / x * bessel_j(nu, x)
    assert abs(r) < 1e-10


@pytest.mark.parametrize("nu", [0.3, -1.25, 2.5 + 1j, 0.4j, 7.0, -3.0])
def test_bessel_against_mpmath(nu):
    for x in (0.05, 0.9, 5.0, 17.0, 33.0):
        ref = complex(mpmath.besselj(nu, x))
        scale = max(abs(ref), abs(complex(mpmath.besselj(nu, x + 0.5))), 1e-300)
        assert abs(bessel_j(nu, x) - ref) <= 1e-12 * max(scale, 1e-3 * abs(ref) + 1e-14)


def test_bessel_range():
    with pytest.raises(RangeError):
        bessel_j(0.3, 61.0)
    with pytest.raises(RangeError):
        bessel_j(0.3, 0.0)
    with pytest.raises(RangeError):
        bessel_j(51.0, 1.0)


def test_bessel_vectorized_matches_scalar():
    xs = np.array([0.3, 1.0, 4.0])
    v = bessel_j(1.3, xs)
    assert v.shape == (3,)
    np.testing.assert_allclose(v, [bessel_j(1.3, float(x)) for x in xs], rtol=1e-15)


def test_bessel_backends_agree():
    if not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    xs = np.linspace(0.1, 40, 50)
    with _accel.use_backend("numba"):
        a = bessel_j(0.7 - 0.2j, xs)
    with _accel.use_backend("numpy"):
        b = bessel_j(0.7 - 0.2j, xs)
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-300)


def test_hankel_examples():
    ref = -1j * math.sqrt(2 / math.pi) * np.exp(1j)
    assert abs(hankel(1, 0.5, 1.0) - ref) < 1e-12
    assert abs(ref - (0.671397 - 0.431099j)) < 1e-6
    s = hankel(1, 0.3, 2.0) + hankel(2, 0.3, 2.0)
    assert abs(s - 2 * bessel_j(0.3, 2.0)) < 1e-14
    nu, x = 1.7, 5.0
    W = hankel(1, nu, x) * hankel_derivative(2, nu, x) - hankel_derivative(1, nu, x) * hankel(2, nu, x)
    assert abs(W - (-4j / (math.pi * x))) / abs(4 / (math.pi * x)) < 1e-10


@pytest.mark.parametrize("nu", [0.3, 1.7 + 0.5j, 0.4j, 2.9])
def test_hankel_against_scipy(nu):
    xs = np.array([0.2, 1.5, 6.0, 15.0])
    for kind, fn in ((1, sps.hankel1), (2, sps.hankel2)):
        if isinstance(nu, complex):
            ref = np.array([complex(mpmath.hankel1(nu, x) if kind == 1 else mpmath.hankel2(nu, x)) for x in xs])
        else:
            ref = fn(nu, xs)
        np.testing.assert_allclose(hankel(kind, nu, xs), ref, rtol=1e-11)


def test_hankel_near_integer_limit():
    xs = np.array([0.5, 2.0, 10.0])
    np.testing.assert_allclose(hankel(1, 1.0, xs), sps.hankel1(1, xs), rtol=1e-9)
    np.testing.assert_allclose(hankel(2, 2.0, xs), sps.hankel2(2, xs), rtol=1e-9)
    with pytest.raises(DegenerateOrderError):
        hankel(1, 3.0, 1.0, limit=False)


def test_bessel_order_flags():
    assert BesselOrder(2.0000001).is_near_integer
    assert not BesselOrder(0.3).is_near_integer
    assert BesselOrder(1 + 1j).integer_distance == pytest.approx(1.0)
    with pytest.raises(RangeError):
        BesselOrder(60.0)


@pytest.mark.parametrize("nu", SWEEP_NU)
def test_recurrence_sweep(nu):
    jm, j0, jp = bessel_j(nu - 1, SWEEP_X), bessel_j(nu, SWEEP_X), bessel_j(nu + 1, SWEEP_X)
    r = np.abs(jm + jp - 2 * nu / SWEEP_X * j0)
    scale = np.maximum(np.maximum(np.abs(jm), np.abs(jp)), np.abs(j0))
    assert np.max(r / scale) <= 1e-10


@pytest.mark.parametrize("nu", SWEEP_NU)
def test_wronskian_sweep(nu):
    x = SWEEP_X
    W = hankel(1, nu, x) * hankel_derivative(2, nu, x) - hankel_derivative(1, nu, x) * hankel(2, nu, x)
    ref = -4j / (np.pi * x)
    assert np.max(np.abs(W - ref) / np.abs(ref)) <= 1e-10


def test_imaginary_order_conjugation():
    x = SWEEP_X
    np.testing.assert_allclose(np.conj(bessel_j(0.4j, x)), bessel_j(-0.4j, x), rtol=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_half_integer_closed_forms(n):
    x = np.linspace(0.2, 30, 40)
    nu = n + 0.5
    sph = {0: np.sin(x) / x, 1: np.sin(x) / x ** 2 - np.cos(x) / x,
           2: (3 / x ** 3 - 1 / x) * np.sin(x) - 3 * np.cos(x) / x ** 2}[n]
    ref_j = np.sqrt(2 * x / np.pi) * sph
    assert np.max(np.abs(bessel_j(nu, x) - ref_j)) <= 1e-12
    h1 = -1j * np.sqrt(2 / (np.pi * x)) * np.exp(1j * x) if n == 0 else None
    if h1 is not None:
        assert np.max(np.abs(hankel(1, 0.5, x) - h1)) <= 1e-12


def test_derivative_against_mpmath():
    for x in (0.7, 4.0, 12.0):
        ref = complex(mpmath.besselj(0.3 + 0.2j, x, derivative=1))
        assert abs(bessel_j_derivative(0.3 + 0.2j, x) - ref) < 1e-12 * max(1, abs(ref))


@settings(max_examples=40, deadline=None)
@given(st.floats(-4.9, 4.9).filter(lambda v: abs(v - round(v)) > 1e-3), st.floats(0.1, 25.0))
def test_sum_of_hankels_is_twice_j(nu, x):
    s = hankel(1, nu, x) + hankel(2, nu, x)
    ref = 2 * bessel_j(nu, x)
    assert abs(s - ref) <= 1e-9 * max(1.0, abs(hankel(1, nu, x)))
