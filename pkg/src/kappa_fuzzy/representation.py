"""Unitary representations of R^D_kappa on finite carriers.

Realizations
------------
``OscillatorTruncation``
    First N Fock states; ``X0 = P`` and ``X_k = lam_k expm(Q)``.
``GridRealization``
    A periodic grid in a logarithmic variable.  ``kind="Q-line"`` is the
    irreducible line realization (``X0 = -i d/dQ``, ``X_k = lam_k e^Q``);
    ``kind="k-space"`` samples functions of momentum ``k`` on sign
    orthants with ``s_i = ln|k_i|``, where the dilation-invariant measure
    ``d^{D-1}k / |k_1 ... k_{D-1}|`` becomes ``d^{D-1}s``.

Group actions below are true representations for the split product
``(t, y)(s, z) = (t + s, e^{-s} y + z)``, with ``g(t, y)`` standing for
``e^{i t X0} e^{i y.X}``.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import DEFAULTS
from .errors import ConvergenceError, DimensionError, InputError, PreconditionError, TruncationWarning
from .group.elements import SplitElement
from .numerics import derivative_matrix, expm, spectral_derivative, spectral_shift, trig_interpolate
from .numerics.quadrature import trapezoid_rule

# ---------------------------------------------------------------------------
# carriers
# ---------------------------------------------------------------------------


class OscillatorTruncation:
    """Span of the first ``N`` number states.

    ``a`` lowers the index, ``Q = (a + a^dag)/sqrt 2`` and
    ``P = -i (a - a^dag)/sqrt 2``.  ``exp_q`` is the exponential of the
    truncated ``Q``; ``exp_q_exact`` holds the truncation of the exact
    operator ``e^Q`` for comparison.
    """

    def __init__(self, N: int):
        if N < 2:
            raise DimensionError("N must be at least 2")
        self.N = int(N)
        a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1).astype(complex)
        self.a = a
        self.adag = a.conj().T
        self.Q = (a + self.adag) / np.sqrt(2.0)
        self.P = -1j * (a - self.adag) / np.sqrt(2.0)
        self._exp_q = None

    @property
    def dim(self) -> int:
        return self.N

    @property
    def exp_q(self) -> np.ndarray:
        if self._exp_q is None:
            self._exp_q = expm(self.Q)
        return self._exp_q

    def exp_q_exact(self) -> np.ndarray:
        """``<m| e^Q |n>`` of the untruncated operator, m, n < N.

        From ``e^Q = e^{1/4} e^{a^dag/sqrt2} e^{a/sqrt2}``.
        """
        from math import lgamma

        N = self.N
        c = 1.0 / np.sqrt(2.0)
        out = np.zeros((N, N))
        lf = np.array([lgamma(n + 1) for n in range(N)])
        for m in range(N):
            for n in range(N):
                acc = 0.0
                for k in range(min(m, n) + 1):
                    # <m|e^{c a^dag}|k> <k|e^{c a}|n>
                    logv = ((m - k + n - k) * np.log(c) - lf[m - k] - lf[n - k]
                            + 0.5 * (lf[m] - lf[k]) + 0.5 * (lf[n] - lf[k]))
                    acc += np.exp(logv)
                out[m, n] = np.exp(0.25) * acc
        return out.astype(complex)

    def ccr_deviation(self) -> float:
        """max |[Q, P] - i| on the first N-1 basis states."""
        C = self.Q @ self.P - self.P @ self.Q - 1j * np.eye(self.N)
        return float(np.max(np.abs(C[:, : self.N - 1])))

    def ground_state(self) -> np.ndarray:
        v = np.zeros(self.N, dtype=complex)
        v[0] = 1.0
        return v


@dataclass(frozen=True, eq=False)
class GridRealization:
    """Periodic grid ``s_j = -L + 2 L j / M`` in a logarithmic variable.

    Parameters
    ----------
    kind : {"Q-line", "k-space"}
    L : half-width of the window
    M : points per axis, a power of two >= 16
    D : group dimension
    orthants : for ``k-space`` only; sign patterns of the included
        orthants, default the positive one.  ``"all"`` includes every sign
        pattern.
    """

    kind: str
    L: float
    M: int
    D: int = 2
    orthants: tuple = None
    s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("Q-line", "k-space"):
            raise InputError(f"unknown grid kind {self.kind!r}")
        if self.M < 16 or self.M & (self.M - 1):
            raise DimensionError("M must be a power of two >= 16")
        if not (np.isfinite(self.L) and self.L > 0):
            raise InputError("L must be positive and finite")
        if self.D < 2:
            raise DimensionError("D must be at least 2")
        if self.kind == "k-space":
            orth = self.orthants
            if orth is None:
                orth = ((1,) * (self.D - 1),)
            elif orth == "all":
                orth = tuple(itertools.product((1, -1), repeat=self.D - 1))
            orth = tuple(tuple(int(v) for v in o) for o in orth)
            for o in orth:
                if len(o) != self.D - 1 or any(v not in (1, -1) for v in o):
                    raise InputError(f"bad orthant {o}")
            object.__setattr__(self, "orthants", orth)
        s = -self.L + 2.0 * self.L * np.arange(self.M) / self.M
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.M

    @property
    def axes(self) -> int:
        return 1 if self.kind == "Q-line" else self.D - 1

    @property
    def block(self) -> int:
        """Size of one orthant block (or the whole line)."""
        return self.M ** self.axes

    @property
    def dim(self) -> int:
        return self.block * (1 if self.kind == "Q-line" else len(self.orthants))

    def mesh(self):
        """Per-axis ``s`` arrays over one block, shape ``(M,)*axes`` each."""
        return np.meshgrid(*([self.s] * self.axes), indexing="ij")

    def momenta(self) -> np.ndarray:
        """``k`` values, shape ``(dim, D-1)`` (k-space only)."""
        if self.kind != "k-space":
            raise PreconditionError("momenta exist only on k-space grids")
        es = np.stack([np.exp(m).ravel() for m in self.mesh()], axis=-1)
        return np.concatenate([es * np.array(o, float) for o in self.orthants], axis=0)

    def orthant_slices(self):
        return [slice(i * self.block, (i + 1) * self.block) for i in range(len(self.orthants))]

    def inner(self, u, v) -> complex:
        """L^2 inner product with the flat measure in the log variables."""
        return complex(np.vdot(u, v) * self.h ** self.axes)


# ---------------------------------------------------------------------------
# operator sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RepOperators:
    """Dense generators ``X0`` and ``Xk`` of a finite realization."""

    X0: np.ndarray
    Xk: tuple
    label: dict
    realization: object = None

    @property
    def D(self) -> int:
        return len(self.Xk) + 1

    @property
    def dim(self) -> int:
        return self.X0.shape[0]

    def apply(self, which: int, v) -> np.ndarray:
        M = self.X0 if which == 0 else self.Xk[which - 1]
        return M @ v


def _dilation_generator(grid: GridRealization) -> np.ndarray:
    """``-i sum_i d/ds_i`` on one block, dense."""
    D1 = derivative_matrix(grid.M, grid.h)
    n = grid.axes
    eye = np.eye(grid.M)
    total = np.zeros((grid.block, grid.block), dtype=complex)
    for ax in range(n):
        factors = [eye] * n
        factors[ax] = D1
        term = factors[0]
        for f in factors[1:]:
            term = np.kron(term, f)
        total += term
    return -1j * total


def jordan_schwinger(realization, lam) -> RepOperators:
    """Line realization ``X0 = -i d/dQ``, ``X_k = lam_k e^Q`` of the algebra.

    ``lam`` must be a unit vector in R^{D-1}; it labels the inequivalent
    irreducible representations.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if abs(np.linalg.norm(lam) - 1.0) > DEFAULTS.unit_vector:
        raise PreconditionError("lambda must be a unit vector")
    if isinstance(realization, OscillatorTruncation):
        X0 = realization.P.copy()
        E = realization.exp_q
    elif isinstance(realization, GridRealization):
        if realization.kind != "Q-line":
            raise PreconditionError("the Jordan-Schwinger form lives on a Q-line grid")
        X0 = -1j * derivative_matrix(realization.M, realization.h)
        E = np.diag(np.exp(realization.s)).astype(complex)
    else:
        raise TypeError("realization must be an OscillatorTruncation or GridRealization")
    Xk = tuple(l * E for l in lam)
    return RepOperators(X0, Xk, {"type": "jordan-schwinger", "lambda": lam.tolist()}, realization)


def l0f_operators(grid: GridRealization) -> RepOperators:
    """Generators on a k-space grid: ``X0 = -i k.grad_k``, ``X_i = k_i``."""
    if grid.kind != "k-space":
        raise PreconditionError("l0F operators need a k-space grid")
    G = _dilation_generator(grid)
    nb = len(grid.orthants)
    X0 = np.kron(np.eye(nb), G) if nb > 1 else G
    k = grid.momenta()
    Xk = tuple(np.diag(k[:, i]).astype(complex) for i in range(grid.D - 1))
    return RepOperators(X0, Xk, {"type": "l0F", "orthants": [list(o) for o in grid.orthants]}, grid)


# ---------------------------------------------------------------------------
# fidelity diagnostics
# ---------------------------------------------------------------------------


def windowed_sine_states(grid: GridRealization, K: int = 4, width: float = None) -> np.ndarray:
    """K orthonormal states supported in ``[-width, width]`` (default L/2).

    State n is proportional to ``sin(n pi u) sin(pi u)``, ``u`` the
    position rescaled to [0, 1] across the support: smooth with vanishing
    value and slope at the ends.
    """
    width = grid.L / 2 if width is None else width
    u = (grid.s + width) / (2 * width)
    inside = (u > 0) & (u < 1)
    cols = []
    for n in range(1, K + 1):
        v = np.where(inside, np.sin(n * np.pi * u) * np.sin(np.pi * u), 0.0)
        cols.append(v)
    V = np.array(cols).T.astype(complex)
    Qm, _ = np.linalg.qr(V)
    return Qm


def low_lying_states(ops: RepOperators, K: int = 4) -> np.ndarray:
    """Default probe subspace: lowest half of the Fock basis, or windowed sines."""
    real = ops.realization
    if isinstance(real, OscillatorTruncation):
        return np.eye(real.N, dtype=complex)[:, : real.N // 2]
    if isinstance(real, GridRealization) and real.kind == "Q-line":
        return windowed_sine_states(real, K)
    raise PreconditionError("no default probe subspace for this realization")


def commutator_deviation(ops: RepOperators, probe=None) -> float:
    """``max_k ||([X0, X_k] + i X_k) P||_2 / ||X_k P||_2`` on probe states P."""
    P = low_lying_states(ops) if probe is None else probe
    worst = 0.0
    for X in ops.Xk:
        C = ops.X0 @ X - X @ ops.X0 + 1j * X
        num = np.linalg.norm(C @ P, 2)
        den = np.linalg.norm(X @ P, 2)
        worst = max(worst, num / den if den > 0 else num)
    return float(worst)


def abelian_deviation(ops: RepOperators) -> float:
    worst = 0.0
    for A, B in itertools.combinations(ops.Xk, 2):
        worst = max(worst, float(np.max(np.abs(A @ B - B @ A))))
    return worst


# ---------------------------------------------------------------------------
# group actions
# ---------------------------------------------------------------------------


def _support_box(values, axes, tol=1e-10):
    mag = np.abs(values)
    peak = mag.max()
    if peak == 0:
        return None
    idx = np.nonzero(mag > tol * peak)
    return [(ax[i.min()], ax[i.max()]) for ax, i in zip(axes, idx)]


def act_l_omega(omega: float, f, axes, g: SplitElement) -> np.ndarray:
    """``(pi(t, y) f)(x) = e^{i omega t} f(e^{-t} x - y)`` on an x-space grid.

    ``f`` holds samples on the tensor grid ``axes`` (one uniform 1-D array
    per spatial direction, D - 1 of them) and is treated as periodic for
    trigonometric interpolation; image points outside the window read 0
    and raise a :class:`TruncationWarning` when the transformed support no
    longer fits.  Generators: ``omega + i x.grad`` and ``i d_k``.
    """
    f = np.asarray(f, dtype=complex)
    axes = [np.asarray(a, float) for a in (axes if isinstance(axes, (list, tuple)) else [axes])]
    if len(axes) != g.D - 1 or f.shape != tuple(a.size for a in axes):
        raise DimensionError("sample shape, axes and group dimension disagree")
    box = _support_box(f, axes)
    if box is not None:
        for (lo, hi), ax, yk in zip(box, axes, g.y):
            a, b = np.exp(g.t) * (lo + yk), np.exp(g.t) * (hi + yk)
            if min(a, b) < ax[0] or max(a, b) > ax[-1]:
                warnings.warn("transformed support leaves the x-window", TruncationWarning, stacklevel=2)
                break
    out = f
    # the image grid is again a tensor grid, so interpolate one axis at a time
    for k, (ax, yk) in enumerate(zip(axes, g.y)):
        h = ax[1] - ax[0]
        target = np.exp(-g.t) * ax - yk
        moved = np.moveaxis(out, k, 0)
        flat = moved.reshape(moved.shape[0], -1)
        interp = np.stack([trig_interpolate(flat[:, c], ax[0], h, target) for c in range(flat.shape[1])], axis=-1)
        inside = (target >= ax[0] - 0.5 * h) & (target <= ax[-1] + 0.5 * h)
        interp[~inside] = 0.0
        out = np.moveaxis(interp.reshape(moved.shape), 0, k)
    return np.exp(1j * omega * g.t) * out


def act_l0f(f, grid: GridRealization, g: SplitElement) -> np.ndarray:
    """``(pi(t, y) phi)(k) = e^{i e^t k.y} phi(e^t k)`` on a k-space grid.

    In the log variables the dilation is a shift by ``t`` along every axis,
    done with a phase ramp, so the action is unitary for the flat measure.
    """
    if grid.kind != "k-space":
        raise PreconditionError("act_l0f needs a k-space grid")
    f = np.asarray(f, dtype=complex)
    if f.shape != (grid.dim,):
        raise DimensionError(f"expected a vector of length {grid.dim}")
    if g.D != grid.D:
        raise DimensionError("group and grid dimensions differ")
    shape = (grid.M,) * grid.axes
    out = np.empty_like(f)
    edge = 0.0
    for sl in grid.orthant_slices():
        block = f[sl].reshape(shape)
        edge = max(edge, _edge_ratio(block))
        for ax in range(grid.axes):
            block = spectral_shift(block, g.t, grid.h, axis=ax)
        out[sl] = block.ravel()
    if edge > DEFAULTS.window_edge and g.t != 0.0:
        warnings.warn("state reaches the edge of the log-k window", TruncationWarning, stacklevel=2)
    k = grid.momenta()
    phase = np.exp(1j * np.exp(g.t) * (k @ g.y))
    return phase * out


def _edge_ratio(block) -> float:
    mag = np.abs(block)
    peak = mag.max()
    if peak == 0:
        return 0.0
    edge = 0.0
    for ax in range(mag.ndim):
        edge = max(edge, np.take(mag, 0, axis=ax).max(), np.take(mag, -1, axis=ax).max())
    return float(edge / peak)


def act_q_line(psi, grid: GridRealization, lam, g: SplitElement) -> np.ndarray:
    """``e^{i t X0} e^{i y.X} psi`` on a Q-line grid: phase then shift."""
    if grid.kind != "Q-line":
        raise PreconditionError("act_q_line needs a Q-line grid")
    lam = np.atleast_1d(np.asarray(lam, float))
    phase = np.exp(1j * float(lam @ g.y) * np.exp(grid.s))
    return spectral_shift(phase * np.asarray(psi, complex), g.t, grid.h)


def generator_flow_check(omega: float, f, x, h: float = 1e-3) -> float:
    """Compare the t-flow derivative of ``act_l_omega`` with ``i (omega + i x d_x) f``.

    One spatial dimension; returns the max deviation relative to max |f'|.
    """
    x = np.asarray(x, float)
    plus = act_l_omega(omega, f, [x], SplitElement(h, [0.0]))
    minus = act_l_omega(omega, f, [x], SplitElement(-h, [0.0]))
    fd = (plus - minus) / (2 * h)
    df = spectral_derivative(f, x[1] - x[0])
    gen = 1j * (omega * np.asarray(f) + 1j * x * df)
    return float(np.max(np.abs(fd - gen)) / np.max(np.abs(gen)))


def fourier_intertwining_check(omega: float, f, x, kmin: float = 0.2, kmax: float = 6.0) -> float:
    """Check that Fourier transform plus ``k^{-i omega - D + 1}`` maps the
    ``l^omega`` generator ``omega + i x d_x`` to ``-i k d_k`` (D = 2).

    With ``fhat(k) = int f(x) e^{ikx} dx`` and ``fhat = k^{-a} phi``,
    ``a = 1 + i omega``, one has ``FT[(omega + i x d_x) f] = k^{-a} (-i k
    d_k) phi``.  Both sides are computed from grid transforms of ``f``,
    ``x f`` and ``x f'``; returns the max relative deviation for
    ``kmin <= k <= kmax``.
    """
    x = np.asarray(x, float)
    f = np.asarray(f, complex)
    hx = x[1] - x[0]
    k = np.linspace(kmin, kmax, 200)
    kern = np.exp(1j * np.outer(k, x)) * hx

    fhat = kern @ f
    dk_fhat = kern @ (1j * x * f)  # d/dk of fhat
    df = spectral_derivative(f, hx)
    lhs = kern @ (omega * f + 1j * x * df)
    a = 1.0 + 1j * omega
    dk_phi = a * k ** (a - 1) * fhat + k ** a * dk_fhat
    rhs = k ** (-a) * (-1j * k * dk_phi)
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))


# ---------------------------------------------------------------------------
# Mellin transform
# ---------------------------------------------------------------------------


def mellin(f, sigma, *, n: int = 4001, u_range=(-60.0, 6.0), tail_tol=None) -> complex:
    """``int_0^inf f(t) t^{-sigma-1} dt`` with ``t = e^u`` and trapezoid in u.

    ``f`` is a vectorized callable of the scale parameter (compose any base
    point into it).  Raises :class:`ConvergenceError` when the integrand is
    not negligible at either end of ``u_range``.
    """
    tail = DEFAULTS.mellin_tail if tail_tol is None else tail_tol
    rule = trapezoid_rule(n, *u_range)
    u = rule.nodes
    vals = np.asarray(f(np.exp(u)), dtype=complex) * np.exp(-complex(sigma) * u)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("Mellin integrand is not finite on the nodes",
                               partial={"sigma": complex(sigma)})
    peak = np.max(np.abs(vals))
    ends = (abs(vals[0]), abs(vals[-1]))
    if peak > 0 and max(ends) > tail * peak:
        raise ConvergenceError(
            f"Mellin integrand does not decay: |ends|/peak = {max(ends) / peak:.2e}",
            partial={"sigma": complex(sigma), "left": ends[0], "right": ends[1], "peak": peak})
    return complex(rule.weights @ vals)


def inverse_mellin(F, t, *, c: float = 0.0, omega_max: float = 40.0, n: int = 801) -> np.ndarray:
    """``(1/2pi) int F(c + i w) t^{c + i w} dw`` over ``|w| <= omega_max``.

    ``F`` is a callable taking a complex ``sigma``.
    """
    rule = trapezoid_rule(n, -omega_max, omega_max)
    sig = c + 1j * rule.nodes
    Fv = np.array([F(s) for s in sig], dtype=complex)
    t = np.atleast_1d(np.asarray(t, float))
    out = (np.exp(np.outer(np.log(t), sig)) * Fv) @ rule.weights / (2 * np.pi)
    return out
