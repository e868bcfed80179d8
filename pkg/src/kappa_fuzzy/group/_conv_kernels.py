"""Cubic interpolation and group convolution kernels (D = 2)."""
from __future__ import annotations

import math

import numpy as np

from .._accel import jitable, njit


@jitable
def cubic_weights(u):
    """Four-point Lagrange weights for nodes -1, 0, 1, 2 at offset ``u``."""
    w0 = -u * (u - 1.0) * (u - 2.0) / 6.0
    w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0
    w2 = -(u + 1.0) * u * (u - 2.0) / 2.0
    w3 = (u + 1.0) * u * (u - 1.0) / 6.0
    return w0, w1, w2, w3


def cubic_interp_np(values, x0, h, pts, axis=0):
    """Interpolate ``values`` along ``axis`` at ``pts``; zero outside the grid.

    Returns an array with ``axis`` replaced by ``pts.shape``.
    """
    values = np.moveaxis(np.asarray(values), axis, 0)
    n = values.shape[0]
    pts = np.asarray(pts, dtype=float)
    u = (pts - x0) / h
    base = np.floor(u).astype(np.int64)
    frac = u - base
    ws = cubic_weights(frac)
    out = np.zeros(pts.shape + values.shape[1:], dtype=np.result_type(values, float))
    for a, w in zip(range(-1, 3), ws):
        idx = base + a
        ok = (idx >= 0) & (idx < n)
        safe = np.where(ok, idx, 0)
        taps = values[safe]
        mask = (ok * w).reshape(pts.shape + (1,) * (values.ndim - 1))
        out = out + mask * taps
    return out


@njit
def _convolve_nb(f1, f2, t, y, skip):
    nt = t.shape[0]
    ny = y.shape[0]
    ht = t[1] - t[0]
    hy = y[1] - y[0]
    out = np.zeros((nt, ny), dtype=np.complex128)
    row = np.zeros(ny, dtype=np.complex128)
    rowmax = np.zeros(nt)
    for k in range(nt):
        m = 0.0
        for l in range(ny):
            a = abs(f1[k, l])
            if a > m:
                m = a
        rowmax[k] = m
    gmax = 0.0
    for k in range(nt):
        if rowmax[k] > gmax:
            gmax = rowmax[k]
    for i in range(nt):
        for k in range(nt):
            if rowmax[k] <= skip * gmax:
                continue
            tau = t[i] - t[k]
            u = (tau - t[0]) / ht
            it = int(math.floor(u))
            if it + 2 < 0 or it - 1 > nt - 1:
                continue
            w0, w1, w2, w3 = cubic_weights(u - it)
            for l in range(ny):
                row[l] = 0.0
            for a in range(4):
                r = it - 1 + a
                if r < 0 or r >= nt:
                    continue
                w = w0 if a == 0 else (w1 if a == 1 else (w2 if a == 2 else w3))
                for l in range(ny):
                    row[l] += w * f2[r, l]
            s = math.exp(t[k] - t[i])
            for j in range(ny):
                acc = 0j
                for l in range(ny):
                    c = f1[k, l]
                    if c == 0:
                        continue
                    v = (y[j] - s * y[l] - y[0]) / hy
                    iy = int(math.floor(v))
                    if iy + 2 < 0 or iy - 1 > ny - 1:
                        continue
                    q0, q1, q2, q3 = cubic_weights(v - iy)
                    val = 0j
                    if iy - 1 >= 0 and iy - 1 < ny:
                        val += q0 * row[iy - 1]
                    if iy >= 0 and iy < ny:
                        val += q1 * row[iy]
                    if iy + 1 >= 0 and iy + 1 < ny:
                        val += q2 * row[iy + 1]
                    if iy + 2 >= 0 and iy + 2 < ny:
                        val += q3 * row[iy + 2]
                    acc += c * val
                out[i, j] += acc
    return out * (ht * hy)


def _convolve_np(f1, f2, t, y, skip):
    nt = t.shape[0]
    ht = t[1] - t[0]
    hy = y[1] - y[0]
    out = np.zeros((nt, y.shape[0]), dtype=np.complex128)
    rowmax = np.abs(f1).max(axis=1)
    active = np.nonzero(rowmax > skip * rowmax.max())[0]
    for i in range(nt):
        taus = t[i] - t[active]
        rows = cubic_interp_np(f2, t[0], ht, taus, axis=0)  # (len(active), ny)
        for n, k in enumerate(active):
            s = math.exp(t[k] - t[i])
            eta = y[:, None] - s * y[None, :]  # (ny_out, ny')
            vals = cubic_interp_np(rows[n], y[0], hy, eta, axis=0)
            out[i] += vals @ f1[k]
    return out * (ht * hy)
