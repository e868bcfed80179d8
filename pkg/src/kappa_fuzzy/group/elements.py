"""Elements of the group R^D_kappa in exponential and split coordinates.

Exponential coordinates label ``g(x) = exp(i x^mu X_mu)``; split
coordinates label ``g(t, y) = g(t, 0) g(0, y)``.  In split coordinates

    (t, y) . (s, z) = (t + s, e^{-s} y + z),     (t, y)^{-1} = (-t, -e^t y).

The array functions (``*_arrays``) broadcast over leading batch axes: ``t``
has shape ``(...)`` and ``y`` has shape ``(..., D-1)``.  The dataclasses
wrap single elements.  The deformation scale is fixed to one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..constants import DEFAULTS
from ..errors import DimensionError, InputError


def phi(x):
    """phi(x) = (e^x - 1)/x with the removable singularity filled in.

    Below ``|x| = 1e-4`` a six-term Taylor series is used, whose truncation
    error there is below 1e-26.
    """
    x = np.asarray(x, dtype=float)
    small = np.abs(x) <= DEFAULTS.phi_taylor_cutoff
    xs = np.where(small, x, 0.0)
    taylor = 1.0 + xs * (1 / 2 + xs * (1 / 6 + xs * (1 / 24 + xs * (1 / 120 + xs / 720))))
    xl = np.where(small, 1.0, x)
    exact = np.expm1(xl) / xl
    out = np.where(small, taylor, exact)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# vectorized arithmetic
# ---------------------------------------------------------------------------


def split_multiply_arrays(t1, y1, t2, y2):
    t1, t2 = np.asarray(t1, float), np.asarray(t2, float)
    y1, y2 = np.asarray(y1, float), np.asarray(y2, float)
    return t1 + t2, np.exp(-t2)[..., None] * y1 + y2


def split_inverse_arrays(t, y):
    t = np.asarray(t, float)
    return -t, -np.exp(t)[..., None] * np.asarray(y, float)


def exp_multiply_arrays(a, b, c, d):
    """g(a, b) g(c, d) = g(a + c, (phi(a) b + e^a phi(c) d) / phi(a + c))."""
    a, c = np.asarray(a, float), np.asarray(c, float)
    num = phi(a)[..., None] * np.asarray(b, float) + (np.exp(a) * phi(c))[..., None] * np.asarray(d, float)
    return a + c, num / phi(a + c)[..., None]


def exp_to_split_arrays(x0, x):
    x0 = np.asarray(x0, float)
    return x0, np.asarray(x, float) * phi(-x0)[..., None]


def split_to_exp_arrays(t, y):
    t = np.asarray(t, float)
    return t, np.asarray(y, float) / phi(-t)[..., None]


# ---------------------------------------------------------------------------
# element types
# ---------------------------------------------------------------------------


def _vector(y, name):
    v = np.array(y, dtype=float).reshape(-1)
    if v.size < 1:
        raise DimensionError(f"{name} must have at least one component (D >= 2)")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} must be finite")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class SplitElement:
    """Group element in split coordinates ``(t, y)``."""

    t: float
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        if not np.isfinite(self.t):
            raise InputError("t must be finite")
        object.__setattr__(self, "y", _vector(self.y, "y"))

    @classmethod
    def identity(cls, D: int) -> "SplitElement":
        return cls(0.0, np.zeros(D - 1))

    @property
    def D(self) -> int:
        return self.y.size + 1

    def __mul__(self, other: "SplitElement") -> "SplitElement":
        return multiply_split(self, other)

    def inverse(self) -> "SplitElement":
        return inverse(self)

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.t], self.y])

    def __eq__(self, other):
        return (isinstance(other, SplitElement) and self.t == other.t
                and np.array_equal(self.y, other.y))

    def __repr__(self):
        return f"SplitElement(t={self.t!r}, y={self.y.tolist()!r})"


@dataclass(frozen=True, eq=False)
class ExpElement:
    """Group element in exponential coordinates ``(x^0, x^k)``."""

    x0: float
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0", float(self.x0))
        if not np.isfinite(self.x0):
            raise InputError("x0 must be finite")
        object.__setattr__(self, "x", _vector(self.x, "x"))

    @property
    def D(self) -> int:
        return self.x.size + 1

    def __mul__(self, other: "ExpElement") -> "ExpElement":
        return multiply_exp(self, other)

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.x0], self.x])

    def __eq__(self, other):
        return (isinstance(other, ExpElement) and self.x0 == other.x0
                and np.array_equal(self.x, other.x))

    def __repr__(self):
        return f"ExpElement(x0={self.x0!r}, x={self.x.tolist()!r})"


def _same_dim(g1, g2):
    if g1.D != g2.D:
        raise DimensionError(f"dimension mismatch: {g1.D} vs {g2.D}")


def multiply_exp(g1: ExpElement, g2: ExpElement) -> ExpElement:
    _same_dim(g1, g2)
    a, x = exp_multiply_arrays(g1.x0, g1.x, g2.x0, g2.x)
    return ExpElement(a, x)


def multiply_split(g1: SplitElement, g2: SplitElement) -> SplitElement:
    _same_dim(g1, g2)
    t, y = split_multiply_arrays(g1.t, g1.y, g2.t, g2.y)
    return SplitElement(t, y)


def inverse(g: SplitElement) -> SplitElement:
    t, y = split_inverse_arrays(g.t, g.y)
    return SplitElement(t, y)


def to_split(g: ExpElement) -> SplitElement:
    t, y = exp_to_split_arrays(g.x0, g.x)
    return SplitElement(t, y)


def from_split(g: SplitElement) -> ExpElement:
    x0, x = split_to_exp_arrays(g.t, g.y)
    return ExpElement(x0, x)


# ---------------------------------------------------------------------------
# Haar measures and modular function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HaarData:
    """Haar densities in split coordinates for dimension ``D``.

    The left-invariant measure is ``dt d^{D-1}y``; the right-invariant one
    carries the extra factor ``e^{(D-1)t}``.  The modular function is fixed
    by ``mu_L(E g) = Delta(g) mu_L(E)``, giving ``Delta(t, y) = e^{-(D-1)t}``.
    """

    D: int

    def __post_init__(self):
        if self.D < 2:
            raise DimensionError("D must be at least 2")

    def left_density(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def right_density(self, t):
        return np.exp((self.D - 1) * np.asarray(t, dtype=float))

    def modular(self, t):
        return np.exp(-(self.D - 1) * np.asarray(t, dtype=float))


def modular(g: SplitElement) -> float:
    """Delta(g) = e^{-(D-1) t}."""
    return float(np.exp(-(g.D - 1) * g.t))
