"""Finite-difference derivatives on uniform grids."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..errors import DimensionError, InputError


@lru_cache(maxsize=None)
def stencil_weights(offsets: tuple, order: int) -> np.ndarray:
    """Weights ``w`` with ``f^(order)(0) ~ sum_j w_j f(offsets_j)`` (unit spacing).

    Solved from the Taylor moment conditions by exact rational elimination,
    so the weights carry no rounding beyond the final conversion to float.
    """
    from fractions import Fraction
    from math import factorial

    n = len(offsets)
    rows = [[Fraction(o) ** k for o in offsets] for k in range(n)]
    rhs = [Fraction(factorial(order)) if k == order else Fraction(0) for k in range(n)]
    # Gaussian elimination in rationals: tiny systems, exact answers
    M = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                fac = M[r][col]
                M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
    return np.array([float(M[i][n]) for i in range(n)])


def _central(order, accuracy):
    half = (order + 1) // 2 + accuracy // 2 - 1
    return tuple(range(-half, half + 1))


def fin_diff(f, order: int, accuracy: int, h: float, axis: int = 0) -> np.ndarray:
    """Derivative of uniformly sampled ``f`` along ``axis``.

    Interior points use central stencils; points near either end use
    one-sided stencils of the same formal accuracy.

    Parameters
    ----------
    f : array_like
        Samples with spacing ``h``.
    order : {1, 2}
    accuracy : {2, 4}
        Formal order of the truncation error, ``O(h**accuracy)``.
    """
    if order not in (1, 2) or accuracy not in (2, 4):
        raise InputError("order must be 1 or 2 and accuracy 2 or 4")
    if not h > 0:
        raise InputError("step must be positive")
    f = np.moveaxis(np.asarray(f), axis, 0)
    n = f.shape[0]
    width = order + accuracy  # one-sided stencil size
    if n < width:
        raise DimensionError(f"{n} samples along axis; stencil needs {width}")
    offs = _central(order, accuracy)
    half = offs[-1]
    out = np.empty(f.shape, dtype=np.result_type(f.dtype, float))
    wc = stencil_weights(offs, order)
    acc = np.zeros((n - 2 * half,) + f.shape[1:], dtype=out.dtype)
    for w, o in zip(wc, offs):
        acc = acc + w * f[half + o: n - half + o]
    out[half:n - half] = acc
    for i in range(half):
        left = tuple(range(-i, width - i))
        right = tuple(range(i - width + 1, i + 1))
        wl = stencil_weights(left, order)
        wr = stencil_weights(right, order)
        out[i] = np.tensordot(wl, f[0:width], axes=(0, 0))
        out[n - 1 - i] = np.tensordot(wr, f[n - width:n], axes=(0, 0))
    out /= h ** order
    return np.moveaxis(out, 0, axis)
