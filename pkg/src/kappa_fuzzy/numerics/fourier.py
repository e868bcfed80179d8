"""Unitary discrete Fourier transform and spectral grid helpers.

The transform itself is :mod:`numpy.fft` with ``norm="ortho"``; the helpers
below add the grid bookkeeping (wavenumbers, phase-ramp shifts, spectral
derivatives and trigonometric interpolation at arbitrary points).
"""
from __future__ import annotations

import numpy as np

from ..errors import DimensionError


def dft(v, direction: str = "forward", axis: int = -1) -> np.ndarray:
    """Unitary DFT (1/sqrt(n) both ways) along ``axis``."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape[axis] < 1:
        raise DimensionError("empty input")
    if direction == "forward":
        return np.fft.fft(v, axis=axis, norm="ortho")
    if direction == "inverse":
        return np.fft.ifft(v, axis=axis, norm="ortho")
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def wavenumbers(n: int, h: float) -> np.ndarray:
    """Angular wavenumbers of an n-point periodic grid with spacing h.

    The Nyquist mode (even n) is assigned wavenumber zero so that odd
    derivatives of real data stay real.
    """
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return k


def spectral_derivative(f, h: float, axis: int = -1, order: int = 1) -> np.ndarray:
    f = np.asarray(f, dtype=np.complex128)
    n = f.shape[axis]
    k = wavenumbers(n, h)
    shape = [1] * f.ndim
    shape[axis] = n
    mult = (1j * k.reshape(shape)) ** order
    return np.fft.ifft(mult * np.fft.fft(f, axis=axis), axis=axis)


def spectral_shift(f, shift: float, h: float, axis: int = -1) -> np.ndarray:
    """Return samples of ``x -> f(x + shift)`` using a phase ramp."""
    f = np.asarray(f, dtype=np.complex128)
    n = f.shape[axis]
    k = wavenumbers(n, h)
    shape = [1] * f.ndim
    shape[axis] = n
    ramp = np.exp(1j * k * shift).reshape(shape)
    return np.fft.ifft(ramp * np.fft.fft(f, axis=axis), axis=axis)


def derivative_matrix(n: int, h: float) -> np.ndarray:
    """Dense matrix of the spectral first derivative on an n-point grid."""
    k = wavenumbers(n, h)
    F = np.fft.fft(np.eye(n), axis=0, norm="ortho")
    return F.conj().T @ (1j * k[:, None] * F)


def trig_interpolate(values, x0: float, h: float, points) -> np.ndarray:
    """Evaluate the trigonometric interpolant of 1-D periodic samples.

    ``values[j]`` sits at ``x0 + j*h``.  The sum is done directly, costing
    ``len(values) * len(points)``.
    """
    values = np.asarray(values, dtype=np.complex128)
    n = values.shape[0]
    coeff = np.fft.fft(values) / n
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        # split the Nyquist term symmetrically so the interpolant is real for real data
        nyq = n // 2
        k = np.append(k, -k[nyq])
        coeff = np.append(coeff, 0.5 * coeff[nyq])
        coeff[nyq] *= 0.5
    pts = np.asarray(points, dtype=float)
    phase = np.exp(1j * np.multiply.outer(pts - x0, k))
    return phase @ coeff
