"""Quadrature rules and integration helpers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, InputError


@dataclass(frozen=True)
class Quadrature:
    """Nodes and weights on ``interval = (a, b)``.

    For the half-line rule built by :func:`half_line_rule` the interval is
    ``(0, inf)``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple

    def __post_init__(self):
        if self.nodes.shape != self.weights.shape:
            raise DimensionError("node and weight counts differ")
        a, b = self.interval
        if not a < b:
            raise InputError(f"empty interval {self.interval}")


def _legendre_newton(n: int):
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n."""
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        dp = n * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-16:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return x[::-1].copy(), w[::-1].copy()


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0) -> Quadrature:
    """n-point Gauss-Legendre rule on [a, b]; exact for degree <= 2n-1."""
    if n < 1:
        raise DimensionError("need at least one node")
    if n == 1:
        x, w = np.zeros(1), np.full(1, 2.0)
    else:
        x, w = _legendre_newton(n)
    half = 0.5 * (b - a)
    return Quadrature(a + half * (x + 1.0), half * w, (a, b))


def trapezoid_rule(n: int, a: float, b: float) -> Quadrature:
    """Composite trapezoid rule on n equispaced nodes including both ends."""
    if n < 2:
        raise DimensionError("trapezoid rule needs at least two nodes")
    x = np.linspace(a, b, n)
    h = (b - a) / (n - 1)
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return Quadrature(x, w, (a, b))


def half_line_rule(n: int = 801, s_min: float = -40.0, s_max: float = 5.0) -> Quadrature:
    """Rule for integrals over (0, inf) through the substitution t = e^s.

    Trapezoid in s is spectrally accurate for integrands that decay at
    both ends in s (e.g. e^{-t} t^a with a > -1).  Default range suits
    integrands with e^{-t}-like decay; widen ``s_max`` for slower tails.
    """
    base = trapezoid_rule(n, s_min, s_max)
    t = np.exp(base.nodes)
    return Quadrature(t, base.weights * t, (0.0, np.inf))


def quad_integrate(f, rule: Quadrature):
    """Apply ``rule`` to ``f``.

    ``f`` is either a callable evaluated at ``rule.nodes`` (vectorized) or an
    array of samples at the nodes; extra trailing axes are integrated
    independently.
    """
    values = f(rule.nodes) if callable(f) else f
    values = np.asarray(values)
    if values.shape[0] != rule.nodes.shape[0]:
        raise DimensionError(f"{values.shape[0]} samples for {rule.nodes.shape[0]} nodes")
    if not np.all(np.isfinite(values)):
        raise InputError("integrand is not finite at some node")
    return np.tensordot(rule.weights, values, axes=(0, 0))
