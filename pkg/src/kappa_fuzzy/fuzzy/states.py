"""Initial states and coherent families ``e^{i t X0} e^{i y.X} phi0``."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..constants import DEFAULTS
from ..errors import DimensionError, InputError, PreconditionError, TruncationWarning
from ..group.elements import SplitElement
from ..numerics import eig_hermitian, expm, spectral_shift
from ..representation import GridRealization, OscillatorTruncation, RepOperators


@dataclass(frozen=True, eq=False)
class InitialState:
    """Unit vector ``phi0`` on the carrier of a realization.

    ``radial`` records that the samples depend on ``|k|`` only (k-space
    grids with D > 2); it is verified as symmetry under permutations of
    the log-momentum axes.
    """

    realization: object
    vector: np.ndarray
    descriptor: dict
    radial: bool = False

    def __post_init__(self):
        v = np.array(self.vector, dtype=complex).reshape(-1)
        if v.size != self.realization.dim:
            raise DimensionError(f"state has {v.size} entries, carrier has {self.realization.dim}")
        if abs(np.linalg.norm(v) - 1.0) > DEFAULTS.state_norm:
            raise PreconditionError("initial state must have unit norm")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        if self.radial and isinstance(self.realization, GridRealization) and self.realization.axes > 1:
            if radial_deviation(self) > DEFAULTS.state_norm:
                raise PreconditionError("samples are not a function of |k|")

    # -------------------------------------------------------------- factories
    @classmethod
    def oscillator_ground(cls, osc: OscillatorTruncation) -> "InitialState":
        return cls(osc, osc.ground_state(), {"type": "oscillator-ground"})

    @classmethod
    def gaussian(cls, grid: GridRealization, center: float = 0.0, width: float = 1.0) -> "InitialState":
        """Gaussian in the grid variable (Q, or ln|k| on the first orthant).

        On k-space grids with several axes the profile is taken in
        ``ln |k|`` so the state is radial.
        """
        if width <= 0:
            raise InputError("width must be positive")
        if grid.kind == "Q-line":
            v = np.exp(-((grid.s - center) ** 2) / (2 * width ** 2)).astype(complex)
            radial = False
        else:
            mesh = grid.mesh()
            logk = 0.5 * np.log(sum(np.exp(2 * m) for m in mesh))
            block = np.exp(-((logk - center) ** 2) / (2 * width ** 2)).ravel()
            v = np.zeros(grid.dim, dtype=complex)
            v[: grid.block] = block
            radial = grid.axes > 1
        return cls(grid, v / np.linalg.norm(v),
                   {"type": "gaussian", "center": float(center), "width": float(width)}, radial)

    def support_extent(self, tol: float = 1e-6) -> float:
        """Largest grid coordinate where ``|phi0| > tol * max``."""
        grid = self.realization
        if not isinstance(grid, GridRealization):
            raise PreconditionError("support extent is defined for grid realizations")
        mag = np.abs(self.vector)
        idx = np.nonzero(mag > tol * mag.max())[0] % grid.block
        coords = np.array(np.unravel_index(idx, (grid.M,) * grid.axes))
        return float(grid.s[coords].max())


def radial_deviation(state: InitialState) -> float:
    """max difference of the samples under permutations of the log-k axes."""
    grid = state.realization
    shape = (grid.M,) * grid.axes
    worst = 0.0
    for sl in grid.orthant_slices():
        block = state.vector[sl].reshape(shape)
        for perm in itertools.permutations(range(grid.axes)):
            worst = max(worst, float(np.max(np.abs(block - np.transpose(block, perm)))))
    return worst


def _axis(a, name):
    a = np.asarray(a, float).reshape(-1)
    if a.size < 1 or not np.all(np.isfinite(a)):
        raise InputError(f"{name} lattice must be finite and non-empty")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoherentFamily:
    """Coherent states on a tensor lattice ``t x y_1 x ... x y_{D-1}``.

    ``states`` has shape ``(len(t), len(y_1), ..., dim)``.  Oscillator
    carriers exponentiate through Hermitian eigendecompositions of ``X0``
    and each ``X_k``; grid carriers use the exact phase-then-shift action.
    """

    initial: InitialState
    ops: RepOperators
    t: np.ndarray
    y: tuple
    states: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t", _axis(self.t, "t"))
        ys = self.y if isinstance(self.y, (tuple, list)) else (self.y,)
        object.__setattr__(self, "y", tuple(_axis(a, "y") for a in ys))
        if len(self.y) != self.ops.D - 1:
            raise DimensionError(f"need {self.ops.D - 1} y-axes")
        if self.ops.dim != self.initial.realization.dim:
            raise DimensionError("operators and initial state live on different carriers")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            states = _lattice_states(self)
        norms = np.linalg.norm(states, axis=-1)
        if np.max(np.abs(norms - 1.0)) > 1e-10:
            raise PreconditionError("coherent states lost unit norm; widen the carrier window")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def D(self) -> int:
        return self.ops.D

    @property
    def dim(self) -> int:
        return self.ops.dim

    @property
    def shape(self) -> tuple:
        return (self.t.size,) + tuple(a.size for a in self.y)

    @property
    def weights(self) -> np.ndarray:
        """Left-Haar (density 1) rectangle weights of the lattice points."""
        w = 1.0
        for a in (self.t,) + self.y:
            w = w * (a[1] - a[0] if a.size > 1 else 1.0)
        return np.full(self.shape, w)

    def flat_states(self) -> np.ndarray:
        return self.states.reshape(-1, self.dim)


def _spectral_exp(H):
    """Return ``(w, V)`` so that ``e^{i s H} = V diag(e^{i s w}) V^H``."""
    return eig_hermitian(H)


def _lattice_states(fam: CoherentFamily) -> np.ndarray:
    phi0 = fam.initial.vector
    real = fam.initial.realization
    shape = fam.shape
    if isinstance(real, GridRealization):
        return _grid_states(fam, real, phi0)
    # y-part: product of commuting exponentials e^{i y_k X_k}
    ymesh = np.meshgrid(*fam.y, indexing="ij")
    vecs = np.broadcast_to(phi0, ymesh[0].shape + (fam.dim,)).copy() if fam.y else phi0[None]
    for yk, X in zip(ymesh, fam.ops.Xk):
        w, V = _spectral_exp(X)
        coef = vecs @ V.conj()  # components in the eigenbasis of X
        coef = coef * np.exp(1j * yk[..., None] * w)
        vecs = coef @ V.T
    w0, V0 = _spectral_exp(fam.ops.X0)
    coef = vecs @ V0.conj()
    out = np.exp(1j * fam.t[:, None] * w0)[:, None, :] * coef.reshape(1, -1, fam.dim)
    out = out @ V0.T
    return out.reshape(shape + (fam.dim,))


def _grid_states(fam, grid, phi0):
    if fam.ops.realization is not grid:
        raise PreconditionError("grid families need operators built on the same grid")
    ymesh = np.meshgrid(*fam.y, indexing="ij")
    if grid.kind == "Q-line":
        lam = np.asarray(fam.ops.label["lambda"], float)
        proj = sum(l * m for l, m in zip(lam, ymesh))
        vecs = np.exp(1j * proj[..., None] * np.exp(grid.s)) * phi0
        axes_shape = (grid.M,)
    else:
        k = grid.momenta()
        proj = sum(m[..., None] * k[:, i] for i, m in enumerate(ymesh))
        vecs = np.exp(1j * proj) * phi0
        axes_shape = (len(grid.orthants),) + (grid.M,) * grid.axes
    flat = vecs.reshape((-1,) + axes_shape)
    out = np.empty((fam.t.size,) + flat.shape, dtype=complex)
    for i, t in enumerate(fam.t):
        moved = flat
        for ax in range(len(axes_shape) - (0 if grid.kind == "Q-line" else 1)):
            moved = spectral_shift(moved, t, grid.h, axis=moved.ndim - 1 - ax)
        out[i] = moved
    return out.reshape(fam.shape + (fam.dim,))


def coherent_state(family: CoherentFamily, t: float, y) -> np.ndarray:
    """``e^{i t X0} e^{i y.X} phi0`` at one point, evaluated directly.

    Oscillator carriers use :func:`expm`; grid carriers use the exact
    phase and spectral shift.  Points outside the lattice window are
    accepted but a :class:`TruncationWarning` is issued.
    """
    y = np.atleast_1d(np.asarray(y, float))
    if y.size != family.D - 1:
        raise DimensionError(f"y needs {family.D - 1} components")
    lo = [family.t[0]] + [a[0] for a in family.y]
    hi = [family.t[-1]] + [a[-1] for a in family.y]
    pt = np.concatenate([[t], y])
    if np.any(pt < np.array(lo) - 1e-12) or np.any(pt > np.array(hi) + 1e-12):
        warnings.warn("point lies outside the lattice window", TruncationWarning, stacklevel=2)
    phi0 = family.initial.vector
    real = family.initial.realization
    if isinstance(real, GridRealization):
        one = CoherentFamily(family.initial, family.ops, [t], tuple([v] for v in y))
        return one.states.reshape(-1)
    Y = sum(yk * X for yk, X in zip(y, family.ops.Xk))
    return expm(1j * t * family.ops.X0) @ (expm(1j * Y) @ phi0)


def group_action(family: CoherentFamily, g: SplitElement, v) -> np.ndarray:
    """Apply ``U(g) = e^{i t X0} e^{i y.X}`` to a vector (oscillator: expm)."""
    v = np.asarray(v, complex)
    Y = sum(yk * X for yk, X in zip(g.y, family.ops.Xk))
    return expm(1j * g.t * family.ops.X0) @ (expm(1j * Y) @ v)
