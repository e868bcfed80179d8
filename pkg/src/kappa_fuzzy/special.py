"""Complex Gamma, complex-order Bessel J and Hankel functions.

Only the ascending power series is used, which keeps the code short and
the accuracy controllable on the desk range ``0 < x <= 60``.  The series
alternates with terms far larger than the sum once ``x`` grows (around
``e^x / sqrt(x)`` at the peak), so it is accumulated in double-double
arithmetic; the prefactor ``(x/2)^nu / Gamma(nu+1)`` is an ordinary double.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from ._accel import njit
from .constants import DEFAULTS
from .errors import DegenerateOrderError, PoleError, RangeError
from .numerics.ddouble import cdd_div, cdd_mul, dd_add, dd_mul_d, two_prod, two_sum

X_MAX = 60.0
ORDER_MAX = 50.0

# Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class BesselOrder:
    """A complex Bessel order with its distance to the nearest integer."""

    nu: complex

    def __post_init__(self):
        nu = complex(self.nu)
        object.__setattr__(self, "nu", nu)
        if abs(nu.real) > ORDER_MAX or abs(nu.imag) > ORDER_MAX:
            raise RangeError(f"order {nu} outside |Re|, |Im| <= {ORDER_MAX}")

    @property
    def integer_distance(self) -> float:
        return abs(self.nu - round(self.nu.real))

    @property
    def is_near_integer(self) -> bool:
        return self.integer_distance < DEFAULTS.near_integer


def _as_order(nu) -> complex:
    return nu.nu if isinstance(nu, BesselOrder) else BesselOrder(nu).nu


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def sinpi(z: complex) -> complex:
    """sin(pi z) with exact reduction by the nearest integer.

    Plain ``sin(pi*z)`` loses all relative accuracy next to integers because
    ``pi*z`` is rounded before the sine sees it.
    """
    z = complex(z)
    n = round(z.real)
    r = complex(z.real - n, z.imag)
    return (-1.0) ** (n % 2) * cmath.sin(math.pi * r)


def cospi(z: complex) -> complex:
    z = complex(z)
    n = round(z.real)
    r = complex(z.real - n, z.imag)
    return (-1.0) ** (n % 2) * cmath.cos(math.pi * r)


def _log_gamma_right(z: complex) -> complex:
    """log Gamma(z) for Re z >= 0.5 (Lanczos, evaluated in log form)."""
    z = z - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma_complex(z) -> complex:
    """Gamma function for complex ``z`` (relative error ~1e-14 on |z| <= 50).

    Raises
    ------
    PoleError
        ``z`` is zero or a negative integer.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return math.pi / (sinpi(z) * cmath.exp(_log_gamma_right(1.0 - z)))
    return cmath.exp(_log_gamma_right(z))


def rgamma(z) -> complex:
    """1/Gamma(z), equal to zero at the poles of Gamma."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        return sinpi(z) * cmath.exp(_log_gamma_right(1.0 - z)) / math.pi
    return cmath.exp(-_log_gamma_right(z))


# ---------------------------------------------------------------------------
# Series kernels: S(nu, x) = sum_m (-x^2/4)^m / (m! (nu+1)_m)
# ---------------------------------------------------------------------------

_MAX_TERMS = 600


@njit
def _series_nb(nu_r, nu_i, x, tol):
    n = x.shape[0]
    out = np.empty(n, dtype=np.complex128)
    for p in range(n):
        qh, ql = two_prod(x[p], x[p])
        qh = -0.25 * qh
        ql = -0.25 * ql
        rrh, rrl, rih, ril = 1.0, 0.0, 0.0, 0.0
        srh, srl, sih, sil = 1.0, 0.0, 0.0, 0.0
        for m in range(_MAX_TERMS):
            m1 = m + 1.0
            # denominator (m+1) * (nu + m + 1), exact in double-double
            ah, al = two_sum(nu_r, m1)
            dah, dal = dd_mul_d(ah, al, m1)
            dih, dil = two_prod(nu_i, m1)
            rrh, rrl, rih, ril = cdd_mul(rrh, rrl, rih, ril, qh, ql, 0.0, 0.0)
            rrh, rrl, rih, ril = cdd_div(rrh, rrl, rih, ril, dah, dal, dih, dil)
            srh, srl = dd_add(srh, srl, rrh, rrl)
            sih, sil = dd_add(sih, sil, rih, ril)
            term = abs(rrh) + abs(rih)
            total = abs(srh) + abs(sih)
            if m1 > abs(nu_r) + abs(nu_i) and m1 * m1 > 0.5 * x[p] * x[p] and term <= tol * total:
                break
        out[p] = complex(srh + srl, sih + sil)
    return out


def _series_np(nu_r, nu_i, x, tol):
    qh, ql = two_prod(x, x)
    qh = -0.25 * qh
    ql = -0.25 * ql
    zeros = np.zeros_like(x)
    rrh, rrl, rih, ril = np.ones_like(x), zeros.copy(), zeros.copy(), zeros.copy()
    srh, srl, sih, sil = np.ones_like(x), zeros.copy(), zeros.copy(), zeros.copy()
    for m in range(_MAX_TERMS):
        m1 = m + 1.0
        ah, al = two_sum(nu_r, m1)
        dah, dal = dd_mul_d(ah, al, m1)
        dih, dil = two_prod(nu_i, m1)
        rrh, rrl, rih, ril = cdd_mul(rrh, rrl, rih, ril, qh, ql, zeros, zeros)
        rrh, rrl, rih, ril = cdd_div(rrh, rrl, rih, ril, dah + zeros, dal + zeros,
                                     dih + zeros, dil + zeros)
        srh, srl = dd_add(srh, srl, rrh, rrl)
        sih, sil = dd_add(sih, sil, rih, ril)
        if m1 > abs(nu_r) + abs(nu_i) and np.all(m1 * m1 > 0.5 * x * x) and np.all(
                np.abs(rrh) + np.abs(rih) <= tol * (np.abs(srh) + np.abs(sih))):
            break
    return (srh + srl) + 1j * (sih + sil)


def _check_x(x) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~np.isfinite(arr)) or np.any(arr <= 0.0) or np.any(arr > X_MAX):
        raise RangeError(f"argument must satisfy 0 < x <= {X_MAX}")
    return arr


def _shape_like(values, x):
    return values[0] if np.ndim(x) == 0 else values.reshape(np.shape(x))


def _bessel_j_array(nu: complex, xs: np.ndarray) -> np.ndarray:
    if _is_nonpositive_integer(nu) and nu != 0:
        n = int(-nu.real)
        return (-1) ** n * _bessel_j_array(complex(n), xs)
    # the series tolerance is far below double precision on purpose: the
    # alternating sum cancels by up to ~x digits before rounding
    tol = 1e-30
    kernel = _series_nb if _accel.use_numba() else _series_np
    S = kernel(float(nu.real), float(nu.imag), np.ascontiguousarray(xs), tol)
    pref = np.exp(nu * np.log(0.5 * xs)) * rgamma(nu + 1.0)
    return pref * S


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x), complex order, 0 < x <= 60.

    ``x`` may be a scalar or an array; the result has the same shape.
    Relative accuracy is near machine precision up to x of about 30; the
    largest series term grows like e^x, so by x = 60 even double-double
    accumulation leaves roughly seven correct digits.
    """
    nu = _as_order(nu)
    xs = _check_x(x)
    return _shape_like(_bessel_j_array(nu, xs), x)


def _hankel_direct(kind: int, nu: complex, xs: np.ndarray) -> np.ndarray:
    jp = _bessel_j_array(nu, xs)
    jm = _bessel_j_array(-nu, xs)
    s = sinpi(nu)
    c = cospi(nu)
    if kind == 1:
        return (jm - (c - 1j * s) * jp) / (1j * s)
    return (jm - (c + 1j * s) * jp) / (-1j * s)


def hankel(kind: int, nu, x, *, limit: bool = True):
    """Hankel function H^{(kind)}_nu(x) built from J_{+nu} and J_{-nu}.

    Near-integer orders (distance below 1e-6) are evaluated as the average
    of the values at ``nu +- eps`` and ``nu +- 2 eps`` combined by one
    Richardson step, ``eps = 1e-5``.  With ``limit=False`` such orders
    raise :class:`DegenerateOrderError` instead.
    """
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    order = nu if isinstance(nu, BesselOrder) else BesselOrder(nu)
    xs = _check_x(x)
    nu = order.nu
    if order.is_near_integer:
        if not limit:
            raise DegenerateOrderError(f"order {nu} is (near) integer")
        eps = DEFAULTS.integer_order_step

        def avg(e):
            return 0.5 * (_hankel_direct(kind, nu + e, xs) + _hankel_direct(kind, nu - e, xs))

        values = (4.0 * avg(eps) - avg(2.0 * eps)) / 3.0
    else:
        values = _hankel_direct(kind, nu, xs)
    return _shape_like(values, x)


def bessel_j_derivative(nu, x):
    """J'_nu(x) = (J_{nu-1}(x) - J_{nu+1}(x)) / 2."""
    nu = _as_order(nu)
    return 0.5 * (bessel_j(nu - 1.0, x) - bessel_j(nu + 1.0, x))


def hankel_derivative(kind: int, nu, x, *, limit: bool = True):
    """d/dx H^{(kind)}_nu(x) via the order recurrence."""
    nu = _as_order(nu)
    return 0.5 * (hankel(kind, nu - 1.0, x, limit=limit) - hankel(kind, nu + 1.0, x, limit=limit))
