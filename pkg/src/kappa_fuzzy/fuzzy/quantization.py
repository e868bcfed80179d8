"""Dequantization ``F -> <phi0| U^dag F U |phi0>`` and the objects built on it."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConditioningWarning, DimensionError, InputError, PreconditionError
from ..group.algebra import GridFunction
from ..numerics import as_matrix, pinv_least_squares, stencil_weights
from ..representation import GridRealization
from .states import CoherentFamily


def _operator(F, family: CoherentFamily, name="F") -> np.ndarray:
    F = as_matrix(F, name=name)
    if F.shape[0] != family.dim:
        raise DimensionError(f"{name} is {F.shape[0]}x{F.shape[0]}, carrier has dimension {family.dim}")
    return F


def _symbol(F, states) -> np.ndarray:
    """``<c|F|c>`` for every row ``c`` of ``states`` (last axis = carrier)."""
    return np.einsum("...i,...i->...", states.conj(), states @ F.T)


def dequantize(F, family: CoherentFamily) -> GridFunction:
    """Sample ``Q^{-1}(F)(t, y) = <phi0| U^dag(t, y) F U(t, y) |phi0>``.

    Returns a :class:`GridFunction` on the family lattice when every axis
    has at least four points; otherwise the raw array.
    """
    F = _operator(F, family)
    vals = _symbol(F, family.states)
    try:
        return GridFunction(family.t, family.y, vals)
    except DimensionError:
        return vals


def _values(f):
    return f.values if isinstance(f, GridFunction) else np.asarray(f)


def star(F1, F2, family: CoherentFamily) -> GridFunction:
    """Star product of the symbols of ``F1`` and ``F2``: the symbol of ``F1 F2``."""
    A = _operator(F1, family, "F1")
    B = _operator(F2, family, "F2")
    return dequantize(A @ B, family)


# ---------------------------------------------------------------------------
# derivative identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComderReport:
    """Deviations between stencil derivatives and commutator symbols.

    ``deviations[0]`` compares ``i d_t Q^{-1}(F)`` with ``Q^{-1}([X0, F])``;
    ``deviations[j]`` compares ``i e^{-t} d_{y_j} Q^{-1}(F)`` with
    ``Q^{-1}([X_j, F])``.  Each is a max absolute difference divided by the
    max modulus of the commutator symbol (absolute when that vanishes).
    """

    h: float
    accuracy: int
    deviations: tuple
    max_deviation: float


def _shifted_family(family: CoherentFamily, axis: int, delta: float) -> CoherentFamily:
    t = family.t + (delta if axis == 0 else 0.0)
    ys = tuple(a + (delta if axis == k + 1 else 0.0) for k, a in enumerate(family.y))
    return CoherentFamily(family.initial, family.ops, t, ys)


def comder_check(F, family: CoherentFamily, h: float = 1e-3, accuracy: int = 4) -> ComderReport:
    """Check the derivative/commutator identities of the symbol map at every lattice point.

    Derivatives use central stencils with ``accuracy`` order in the step
    ``h``, built from coherent states recomputed at shifted points.
    """
    if accuracy % 2 or accuracy < 2:
        raise InputError("accuracy must be a positive even integer")
    if not (0 < h < 1):
        raise InputError("h must lie in (0, 1)")
    F = _operator(F, family)
    p = accuracy // 2
    offsets = tuple(range(-p, p + 1))
    w = stencil_weights(offsets, 1)
    gens = (family.ops.X0,) + tuple(family.ops.Xk)
    T = np.meshgrid(family.t, *family.y, indexing="ij")[0]
    devs = []
    for axis, X in enumerate(gens):
        deriv = np.zeros(family.shape, dtype=complex)
        for off, wk in zip(offsets, w):
            if wk == 0:
                continue
            fam = _shifted_family(family, axis, off * h)
            deriv += float(wk) * _symbol(F, fam.states)
        deriv /= h
        lhs = 1j * deriv if axis == 0 else 1j * np.exp(-T) * deriv
        rhs = _symbol(X @ F - F @ X, family.states)
        scale = np.max(np.abs(rhs))
        diff = np.max(np.abs(lhs - rhs))
        devs.append(float(diff / scale) if scale > 1e-300 else float(diff))
    return ComderReport(float(h), int(accuracy), tuple(devs), max(devs))


def convergence_order(errors, steps) -> list:
    """Observed orders ``log(e_i / e_{i+1}) / log(h_i / h_{i+1})``."""
    e = np.asarray(errors, float)
    s = np.asarray(steps, float)
    return [float(np.log(e[i] / e[i + 1]) / np.log(s[i] / s[i + 1])) for i in range(e.size - 1)]


# ---------------------------------------------------------------------------
# least-squares quantization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantizeResult:
    """``F`` with ``dequantize(F) ~ f`` and the conditioning of the sampling map."""

    F: np.ndarray
    rank: int
    truncated: int
    condition: float
    relative_residual: float


def sampling_matrix(family: CoherentFamily, basis: int = None) -> np.ndarray:
    """Rows ``conj(c_a) c_b`` over lattice points for matrix units ``E_ab``, ``a, b < basis``."""
    r = family.dim if basis is None else int(basis)
    if not 1 <= r <= family.dim:
        raise DimensionError("basis size must lie in [1, dim]")
    C = family.flat_states()[:, :r]
    return (C.conj()[:, :, None] * C[:, None, :]).reshape(C.shape[0], r * r)


def quantize_ls(f, family: CoherentFamily, basis: int = None, *, rcond=None) -> QuantizeResult:
    """Least-squares inverse of :func:`dequantize` on the span of ``basis`` matrix units.

    Singular values of the sampling map below ``rcond * s_max`` are
    dropped; a :class:`ConditioningWarning` reports the count.  The
    returned matrix is ``dim x dim`` with zeros outside the leading block.
    """
    vals = _values(f).reshape(-1)
    r = family.dim if basis is None else int(basis)
    A = sampling_matrix(family, r)
    if A.shape[0] < A.shape[1]:
        raise PreconditionError(f"{A.shape[0]} samples cannot determine {A.shape[1]} unknowns")
    x, info = pinv_least_squares(A, vals, rcond=rcond, full_output=True)
    if info.truncated:
        warnings.warn(f"sampling map is rank deficient: {info.truncated} directions dropped",
                      ConditioningWarning, stacklevel=2)
    s = info.singular_values
    kept = s[: info.rank]
    cond = float(kept[0] / kept[-1]) if kept.size else float("inf")
    F = np.zeros((family.dim, family.dim), dtype=complex)
    F[:r, :r] = x.reshape(r, r)
    return QuantizeResult(F, info.rank, info.truncated, cond, info.relative_residual)


# ---------------------------------------------------------------------------
# overcompleteness operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BReport:
    """``B = sum_p w_p |c_p><c_p|`` with sector diagnostics.

    ``complement_weight`` is ``tr(P_c B P_c) / tr B`` for the orthants not
    carrying the initial state.  ``offdiag_ratio`` is the largest
    off-diagonal modulus of ``P^dag B P`` over the mean diagonal modulus
    for orthonormal probe states ``P`` in the selected orthant;
    ``diagonal_spread`` is ``(max - min) / mean`` of that diagonal.
    """

    B: np.ndarray
    trace: float
    selected: int
    complement_weight: float
    offdiag_ratio: float
    diagonal_spread: float
    probe_diagonal: np.ndarray


def hermite_probes(grid: GridRealization, K: int = 4, width: float = 0.5, center: float = 0.0) -> np.ndarray:
    """Orthonormalized Hermite functions in one log variable (D = 2 blocks)."""
    from numpy.polynomial.hermite import hermval

    u = (grid.s - center) / width
    cols = [hermval(u, [0] * n + [1]) * np.exp(-u ** 2 / 2) for n in range(K)]
    Q, _ = np.linalg.qr(np.array(cols).T.astype(complex))
    return Q


def b_operator(family: CoherentFamily, probe=None) -> BReport:
    """Weighted sum of coherent projectors over the lattice with sector diagnostics.

    Needs a k-space grid family.  ``probe`` holds column vectors on one
    orthant block; the default is four Hermite functions of width 0.5 in
    ``ln k`` (D = 2) or their tensor products (D > 2).  A
    :class:`ConditioningWarning` is issued when the y-lattice spacing
    aliases the phases ``e^{i y k}`` over the support of the initial state.
    """
    grid = family.initial.realization
    if not (isinstance(grid, GridRealization) and grid.kind == "k-space"):
        raise PreconditionError("the B diagnostics need a k-space grid family")
    for a in family.y:
        if a.size > 1:
            kmax = np.exp(family.initial.support_extent())
            if (a[1] - a[0]) * kmax > np.pi:
                warnings.warn("y-lattice too coarse for the state support: phases alias",
                              ConditioningWarning, stacklevel=2)
                break
    C = family.flat_states()
    w = family.weights.reshape(-1)
    B = (C.T * w) @ C.conj()
    B = 0.5 * (B + B.conj().T)
    tr = float(np.trace(B).real)
    slices = grid.orthant_slices()
    phi0 = family.initial.vector
    selected = int(np.argmax([np.linalg.norm(phi0[sl]) for sl in slices]))
    comp = sum(np.trace(B[sl, sl]).real for i, sl in enumerate(slices) if i != selected)
    if probe is None:
        P1 = hermite_probes(grid)
        probe = P1
        for _ in range(grid.axes - 1):
            probe = np.kron(probe, P1)
    P = np.asarray(probe, complex)
    if P.shape[0] != grid.block:
        raise DimensionError("probe vectors must live on one orthant block")
    sel = slices[selected]
    Bs = P.conj().T @ B[sel, sel] @ P
    diag = np.abs(np.diag(Bs))
    off = np.abs(Bs - np.diag(np.diag(Bs)))
    mean = float(diag.mean())
    return BReport(B, tr, selected, float(comp / tr) if tr > 0 else 0.0,
                   float(off.max() / mean), float((diag.max() - diag.min()) / mean), diag)
