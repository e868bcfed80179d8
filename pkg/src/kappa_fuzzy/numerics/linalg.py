"""Dense complex linear algebra.

``expm``, ``eig_hermitian`` and ``eig_general`` are implemented here; the
singular value decomposition behind ``pinv_least_squares`` is LAPACK's
(through :func:`numpy.linalg.svd`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _accel
from ..constants import DEFAULTS
from ..errors import ConvergenceError, DimensionError, InputError, PreconditionError, RangeError
from . import _kernels as K


def as_matrix(M, *, square=True, name="M") -> np.ndarray:
    """Validate and copy ``M`` into a C-contiguous complex128 array."""
    A = np.array(M, dtype=np.complex128, copy=True, order="C")
    if A.ndim != 2:
        raise DimensionError(f"{name} must be two-dimensional, got shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


# ---------------------------------------------------------------------------
# Matrix exponential
# ---------------------------------------------------------------------------

# Higham (2005) degree thresholds and Pade coefficients.
_THETA = {3: 1.495585217958292e-2, 5: 2.539398330063230e-1,
          7: 9.504178996162932e-1, 9: 2.097847961257068e0, 13: 5.371920351148152e0}
_PADE_B = {
    3: (120., 60., 12., 1.),
    5: (30240., 15120., 3360., 420., 30., 1.),
    7: (17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.),
    9: (17643225600., 8821612800., 2075673600., 302702400., 30270240.,
        2162160., 110880., 3960., 90., 1.),
    13: (64764752532480000., 32382376266240000., 7771770303897600.,
         1187353796428800., 129060195264000., 10559470521600.,
         670442572800., 33522128640., 1323241920., 40840800., 960960.,
         16380., 182., 1.),
}


def _pade(A, m):
    b = _PADE_B[m]
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    A2 = A @ A
    if m == 13:
        A4 = A2 @ A2
        A6 = A4 @ A2
        U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
                 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
        V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
             + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    else:
        powers = [ident, A2]
        for _ in range(2, m // 2 + 1):
            powers.append(powers[-1] @ A2)
        U = A @ sum(b[2 * j + 1] * powers[j] for j in range(m // 2 + 1))
        V = sum(b[2 * j] * powers[j] for j in range(m // 2 + 1))
    return np.linalg.solve(V - U, V + U)


def expm(M) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a diagonal Pade approximant.

    The Pade degree (3, 5, 7, 9 or 13) and the number of squarings are
    picked from the 1-norm, following the standard backward-error bounds.

    Raises
    ------
    DimensionError
        ``M`` is not square.
    RangeError
        The norm is so large that the result overflows.
    """
    A = as_matrix(M)
    if A.shape[0] == 0:
        return A
    norm1 = np.max(np.sum(np.abs(A), axis=0))
    for m in (3, 5, 7, 9):
        if norm1 <= _THETA[m]:
            return _pade(A, m)
    s = max(0, int(np.ceil(np.log2(norm1 / _THETA[13]))))
    if s > 1000:
        raise RangeError(f"matrix norm {norm1:.3g} too large for expm")
    X = _pade(A / 2.0 ** s, 13)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            X = X @ X
    if not np.all(np.isfinite(X)):
        raise RangeError(f"expm overflowed (1-norm {norm1:.3g})")
    return X


# ---------------------------------------------------------------------------
# Hermitian eigenproblem
# ---------------------------------------------------------------------------


def eig_hermitian(M, *, tol=None, max_sweeps=60):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns
    -------
    w : ndarray of float, ascending
    V : ndarray, unitary; ``M @ V == V @ diag(w)``
    """
    A = as_matrix(M)
    n = A.shape[0]
    scale = max(np.linalg.norm(A), 1.0)
    herm_tol = DEFAULTS.hermitian_check if tol is None else tol
    if np.max(np.abs(A - A.conj().T), initial=0.0) > herm_tol * scale:
        raise PreconditionError("matrix is not Hermitian within tolerance")
    A = 0.5 * (A + A.conj().T)
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    kernel = K._jacobi_nb if _accel.use_numba() else K._jacobi_np
    D, V, sweeps = kernel(A, DEFAULTS.jacobi_offdiag, max_sweeps)
    if sweeps < 0:
        raise ConvergenceError("Jacobi iteration did not converge",
                               partial=(np.real(np.diag(D)), V))
    w = np.real(np.diag(D)).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


# ---------------------------------------------------------------------------
# General eigenproblem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigResult:
    """Output of :func:`eig_general`.

    ``condition[i]`` is the eigenvalue condition number ``1/|y_i^H x_i|``
    with unit left and right eigenvectors.  ``ill_conditioned`` and
    ``defective`` are boolean flags derived from it.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    condition: np.ndarray
    ill_conditioned: np.ndarray
    defective: np.ndarray
    left_vectors: np.ndarray

    def __iter__(self):
        # allows ``w, V, flags = eig_general(M)``
        yield self.eigenvalues
        yield self.vectors
        yield {"condition": self.condition, "ill_conditioned": self.ill_conditioned,
               "defective": self.defective}


def hessenberg(M):
    """Unitary Hessenberg reduction ``M = Q H Q^H``; returns ``(H, Q)``."""
    A = as_matrix(M)
    kernel = K._hessenberg_nb if _accel.use_numba() else K._hessenberg_np
    return kernel(A)


def schur(M, *, deflation=None, iteration_factor=None):
    """Complex Schur form ``M = Z T Z^H`` by shifted QR on the Hessenberg form.

    Raises :class:`ConvergenceError` when the iteration cap
    (``iteration_factor * n`` QR sweeps) is exhausted; ``partial`` then holds
    the converged eigenvalues keyed by their diagonal index.
    """
    deflation = DEFAULTS.qr_deflation if deflation is None else deflation
    factor = DEFAULTS.qr_iteration_factor if iteration_factor is None else iteration_factor
    H, Q = hessenberg(M)
    n = H.shape[0]
    defl_abs = deflation * np.linalg.norm(H)
    kernel = K._schur_nb if _accel.use_numba() else K._schur_np
    T, Z, hi = kernel(H, Q, defl_abs, factor * max(n, 1))
    if hi >= 0:
        converged = {int(i): complex(T[i, i]) for i in range(hi + 1, n)}
        raise ConvergenceError(
            f"QR iteration cap reached with {n - hi - 1} of {n} eigenvalues converged",
            partial=converged)
    return np.triu(T), Z


def eig_general(M, *, deflation=None, iteration_factor=None,
                ill_conditioned=None, defective=None) -> EigResult:
    """Eigenvalues and right eigenvectors of a general complex matrix.

    Hessenberg reduction, Wilkinson-shifted complex QR, and back substitution
    on the triangular factor.  Eigenvectors have unit 2-norm.

    Examples
    --------
    >>> w, V, flags = eig_general([[0, -1], [1, 0]])
    >>> sorted(np.round(w, 12), key=lambda z: z.imag)
    [-1j, 1j]
    """
    ill = DEFAULTS.ill_conditioned if ill_conditioned is None else ill_conditioned
    dfc = DEFAULTS.defective if defective is None else defective
    T, Z = schur(M, deflation=deflation, iteration_factor=iteration_factor)
    n = T.shape[0]
    if n == 0:
        empty = np.zeros(0)
        return EigResult(empty.astype(complex), np.zeros((0, 0), complex), empty,
                         empty.astype(bool), empty.astype(bool), np.zeros((0, 0), complex))
    tnorm = max(np.linalg.norm(T), np.finfo(float).tiny)
    smin = np.finfo(float).eps * tnorm
    kernel = K._triangular_vectors_nb if _accel.use_numba() else K._triangular_vectors_np
    X, Y = kernel(T, smin)
    w = np.diag(T).copy()
    overlap = np.abs(np.sum(np.conj(Y) * X, axis=0))
    with np.errstate(divide="ignore"):
        cond = np.where(overlap > 0, 1.0 / overlap, np.inf)
    V = Z @ X
    V /= np.linalg.norm(V, axis=0)
    W = Z @ Y
    return EigResult(w, V, cond, cond > ill, cond > dfc, W)


# ---------------------------------------------------------------------------
# Least squares
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LstsqInfo:
    rank: int
    singular_values: np.ndarray
    truncated: int
    residual_norm: float
    relative_residual: float


def pinv_least_squares(A, b, *, rcond=None, full_output=False):
    """Minimum-norm least-squares solution with truncated SVD.

    Singular values below ``rcond * s_max`` (default 1e-10) are dropped; the
    number dropped is reported through ``full_output=True``.
    """
    rcond = DEFAULTS.svd_truncation if rcond is None else rcond
    A = as_matrix(A, square=False, name="A")
    b = np.asarray(b, dtype=np.complex128)
    if b.shape[0] != A.shape[0]:
        raise DimensionError(f"right-hand side has {b.shape[0]} rows, A has {A.shape[0]}")
    if not np.all(np.isfinite(b)):
        raise InputError("right-hand side has non-finite entries")
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    keep = s > rcond * (s[0] if s.size else 0.0)
    coeff = (U[:, keep].conj().T @ b) / (s[keep] if b.ndim == 1 else s[keep][:, None])
    x = Vh[keep].conj().T @ coeff
    if not full_output:
        return x
    res = float(np.linalg.norm(A @ x - b))
    bn = float(np.linalg.norm(b))
    info = LstsqInfo(int(keep.sum()), s, int((~keep).sum()), res, res / bn if bn else 0.0)
    return x, info
