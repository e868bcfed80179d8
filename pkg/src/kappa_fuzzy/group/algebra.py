"""Sampled functions on the group and the group-algebra operations.

A :class:`GridFunction` holds complex samples on a uniform tensor grid in
split coordinates.  ``convolve`` and ``involution`` are implemented for
D = 2, where the convolution integral costs ``O(M^4)`` for an ``M x M``
grid.
"""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .. import _accel
from ..constants import DEFAULTS
from ..errors import DimensionError, TruncationWarning
from . import _conv_kernels as K


def _frozen(a, dtype):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples ``values[i, j, ...]`` at ``(t[i], y[0][j], ...)``.

    Attributes
    ----------
    t : 1-D uniform grid
    y : tuple of 1-D uniform grids, one per spatial axis (D - 1 of them)
    values : array of shape ``(len(t), len(y[0]), ...)``
    truncation : float
        Relative size of the samples on the window boundary of the inputs
        that produced this function (0 for directly sampled data).
    """

    t: np.ndarray
    y: tuple
    values: np.ndarray
    truncation: float = field(default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "t", _frozen(self.t, float))
        axes = self.y if isinstance(self.y, (tuple, list)) else (self.y,)
        object.__setattr__(self, "y", tuple(_frozen(a, float) for a in axes))
        vals = _frozen(self.values, complex)
        shape = (self.t.size,) + tuple(a.size for a in self.y)
        if vals.shape != shape:
            raise DimensionError(f"values shape {vals.shape} does not match grid {shape}")
        for ax in (self.t,) + self.y:
            if ax.size < 4:
                raise DimensionError("each axis needs at least four points")
            d = np.diff(ax)
            if not np.allclose(d, d[0], rtol=1e-9, atol=0.0) or d[0] <= 0:
                raise DimensionError("grid axes must be uniform and increasing")
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, fn, t, *y):
        """Sample ``fn(T, Y1, ...)`` (broadcasting arrays) on the tensor grid."""
        mesh = np.meshgrid(np.asarray(t, float), *[np.asarray(a, float) for a in y], indexing="ij")
        return cls(t, tuple(y), np.asarray(fn(*mesh), dtype=complex))

    @property
    def D(self) -> int:
        return 1 + len(self.y)

    @property
    def steps(self):
        return (self.t[1] - self.t[0],) + tuple(a[1] - a[0] for a in self.y)

    def with_values(self, values, truncation=None):
        return GridFunction(self.t, self.y, values,
                            self.truncation if truncation is None else truncation)

    def edge_ratio(self) -> float:
        """max |f| on the window boundary divided by max |f|."""
        v = np.abs(self.values)
        peak = v.max()
        if peak == 0:
            return 0.0
        edge = 0.0
        for ax in range(v.ndim):
            edge = max(edge, np.take(v, 0, axis=ax).max(), np.take(v, -1, axis=ax).max())
        return float(edge / peak)

    def integral(self, density=None) -> complex:
        """Trapezoid integral with optional density ``density(T, Y...)``."""
        vals = self.values
        if density is not None:
            mesh = np.meshgrid(self.t, *self.y, indexing="ij")
            vals = vals * density(*mesh)
        for ax, h in enumerate(self.steps):
            vals = np.trapezoid(vals, dx=h, axis=0)
        return complex(vals)

    def l2_norm(self) -> float:
        return float(np.sqrt(abs(self.with_values(np.abs(self.values) ** 2).integral())))

    def interpolate(self, t, y) -> np.ndarray:
        """Tensor cubic interpolation (D = 2) at points ``(t, y)``; zero outside."""
        if self.D != 2:
            raise DimensionError("interpolation is implemented for D = 2")
        t = np.asarray(t, float)
        y = np.asarray(y, float)
        ht, hy = self.steps
        ut = (t - self.t[0]) / ht
        it = np.floor(ut).astype(np.int64)
        wt = K.cubic_weights(ut - it)
        uy = (y - self.y[0][0]) / hy
        iy = np.floor(uy).astype(np.int64)
        wy = K.cubic_weights(uy - iy)
        nt, ny = self.values.shape
        out = np.zeros(np.broadcast(t, y).shape, dtype=complex)
        for a in range(4):
            ra = it + a - 1
            oka = (ra >= 0) & (ra < nt)
            for b in range(4):
                rb = iy + b - 1
                ok = oka & (rb >= 0) & (rb < ny)
                v = self.values[np.where(ok, ra, 0), np.where(ok, rb, 0)]
                out += np.where(ok, wt[a] * wy[b] * v, 0.0)
        return out

    # ------------------------------------------------------------------ IO
    def header(self) -> dict:
        return {
            "D": self.D,
            "window": {"t": [float(self.t[0]), float(self.t[-1])],
                       "y": [[float(a[0]), float(a[-1])] for a in self.y]},
            "resolution": [int(self.t.size)] + [int(a.size) for a in self.y],
        }

    def to_csv(self, path, header_path=None) -> None:
        """Write ``t, y1.., re, im`` rows; the JSON header goes next to it."""
        mesh = np.meshgrid(self.t, *self.y, indexing="ij")
        cols = ["t"] + [f"y{k + 1}" for k in range(len(self.y))] + ["re", "im"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            flat = [m.ravel() for m in mesh] + [self.values.real.ravel(), self.values.imag.ravel()]
            for row in zip(*flat):
                w.writerow([repr(float(v)) for v in row])
        header_path = header_path or str(path) + ".json"
        with open(header_path, "w") as fh:
            json.dump(self.header(), fh, indent=2, sort_keys=True)

    @classmethod
    def from_csv(cls, path, header_path=None) -> "GridFunction":
        header_path = header_path or str(path) + ".json"
        with open(header_path) as fh:
            head = json.load(fh)
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        shape = tuple(head["resolution"])
        d = head["D"]
        t = data[:, 0].reshape(shape)[(slice(None),) + (0,) * (d - 1)]
        ys = []
        for k in range(d - 1):
            idx = [0] * d
            idx[k + 1] = slice(None)
            ys.append(data[:, k + 1].reshape(shape)[tuple(idx)])
        vals = (data[:, d] + 1j * data[:, d + 1]).reshape(shape)
        return cls(t, tuple(ys), vals)


def _check_pair(f1: GridFunction, f2: GridFunction):
    if f1.D != 2 or f2.D != 2:
        raise DimensionError("convolution is implemented for D = 2 grids")
    if not (np.array_equal(f1.t, f2.t) and np.array_equal(f1.y[0], f2.y[0])):
        raise DimensionError("convolution operands must share one grid")


def convolve(f1: GridFunction, f2: GridFunction, *, edge_tol=None) -> GridFunction:
    """Group convolution ``(f1 * f2)(g) = int dmu_L(h) f1(h) f2(h^{-1} g)``.

    In split coordinates the integrand is
    ``f1(t', y') f2(t - t', y - e^{t' - t} y')``; the second factor is read
    off the grid by tensor cubic interpolation (zero outside the window)
    and the integral is a composite rectangle/trapezoid sum.

    A :class:`TruncationWarning` is issued when either operand is larger
    than ``edge_tol`` (relative) on the window boundary; the worse ratio is
    stored in ``result.truncation``.
    """
    _check_pair(f1, f2)
    tol = DEFAULTS.window_edge if edge_tol is None else edge_tol
    trunc = max(f1.edge_ratio(), f2.edge_ratio())
    if trunc > tol:
        warnings.warn(f"operand support reaches the window edge (ratio {trunc:.2e})",
                      TruncationWarning, stacklevel=2)
    kernel = K._convolve_nb if _accel.use_numba() else K._convolve_np
    out = kernel(np.ascontiguousarray(f1.values), np.ascontiguousarray(f2.values),
                 np.ascontiguousarray(f1.t), np.ascontiguousarray(f1.y[0]),
                 DEFAULTS.support_skip)
    return GridFunction(f1.t, f1.y, out, truncation=trunc)


def involution(f: GridFunction, *, modular_sign: int = -1) -> GridFunction:
    """``f*(g) = conj(f(g^{-1})) Delta(g^{-1})`` with ``Delta = e^{-(D-1)t}``.

    ``modular_sign=+1`` selects the opposite convention ``e^{+(D-1)t}``; it
    exists only so tests can show that convention breaking the
    anti-homomorphism property.
    """
    if f.D != 2:
        raise DimensionError("involution is implemented for D = 2 grids")
    T, Y = np.meshgrid(f.t, f.y[0], indexing="ij")
    vals = np.conj(f.interpolate(-T, -np.exp(T) * Y))
    # Delta(g^{-1}) where g^{-1} has time coordinate -t
    vals = vals * np.exp(modular_sign * (f.D - 1) * (-T))
    return f.with_values(vals)
