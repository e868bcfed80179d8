"""Eigen-solver kernels in two flavours.

``*_nb`` functions are compiled with numba and loop element by element;
``*_np`` functions do the same arithmetic with numpy slice operations.
Both return identical results up to rounding and are cross-checked in the
test suite.
"""
from __future__ import annotations

import numpy as np

from .._accel import njit

# ---------------------------------------------------------------------------
# Hermitian Jacobi
# ---------------------------------------------------------------------------


@njit
def _jacobi_nb(A, tol, max_sweeps):
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(A[i, j]) ** 2
    scale = np.sqrt(scale)
    if scale == 0.0:
        return A, V, 0
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += abs(A[p, q]) ** 2
        if np.sqrt(2.0 * off) <= tol * scale:
            return A, V, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                alpha = A[p, p].real
                beta = A[q, q].real
                phase = apq / mag
                theta = (beta - alpha) / (2.0 * mag)
                sgn = 1.0 if theta >= 0.0 else -1.0
                t = sgn / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # J = [[c, s], [-s*conj(phase), c*conj(phase)]] on columns p, q
                jqp = -s * np.conj(phase)
                jqq = c * np.conj(phase)
                for i in range(n):
                    aip = A[i, p]
                    aiq = A[i, q]
                    A[i, p] = aip * c + aiq * jqp
                    A[i, q] = aip * s + aiq * jqq
                for j in range(n):
                    apj = A[p, j]
                    aqj = A[q, j]
                    A[p, j] = c * apj + np.conj(jqp) * aqj
                    A[q, j] = s * apj + np.conj(jqq) * aqj
                for i in range(n):
                    vip = V[i, p]
                    viq = V[i, q]
                    V[i, p] = vip * c + viq * jqp
                    V[i, q] = vip * s + viq * jqq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return A, V, -1


def _jacobi_np(A, tol, max_sweeps):
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return A, V, 0
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.abs(A[iu]) ** 2))
        if off <= tol * scale:
            return A, V, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = A[:, [p, q]] @ J
                A[:, p], A[:, q] = cols[:, 0], cols[:, 1]
                rows = J.conj().T @ A[[p, q], :]
                A[p, :], A[q, :] = rows[0], rows[1]
                vc = V[:, [p, q]] @ J
                V[:, p], V[:, q] = vc[:, 0], vc[:, 1]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
    return A, V, -1


# ---------------------------------------------------------------------------
# Hessenberg reduction
# ---------------------------------------------------------------------------


@njit
def _hessenberg_nb(H):
    n = H.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    v = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        norm = 0.0
        for i in range(k + 1, n):
            norm += abs(H[i, k]) ** 2
        norm = np.sqrt(norm)
        if norm == 0.0:
            continue
        x0 = H[k + 1, k]
        ph = x0 / abs(x0) if abs(x0) > 0 else 1.0 + 0j
        for i in range(k + 1, n):
            v[i] = H[i, k]
        v[k + 1] += ph * norm
        vn = 0.0
        for i in range(k + 1, n):
            vn += abs(v[i]) ** 2
        vn = np.sqrt(vn)
        for i in range(k + 1, n):
            v[i] /= vn
        # H <- (I - 2vv^H) H
        for j in range(k, n):
            acc = 0j
            for i in range(k + 1, n):
                acc += np.conj(v[i]) * H[i, j]
            for i in range(k + 1, n):
                H[i, j] -= 2.0 * v[i] * acc
        # H <- H (I - 2vv^H), Q <- Q (I - 2vv^H)
        for i in range(n):
            acc = 0j
            accq = 0j
            for j in range(k + 1, n):
                acc += H[i, j] * v[j]
                accq += Q[i, j] * v[j]
            for j in range(k + 1, n):
                H[i, j] -= 2.0 * acc * np.conj(v[j])
                Q[i, j] -= 2.0 * accq * np.conj(v[j])
        for i in range(k + 2, n):
            H[i, k] = 0.0
    return H, Q


def _hessenberg_np(H):
    n = H.shape[0]
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        ph = x[0] / abs(x[0]) if abs(x[0]) > 0 else 1.0
        x[0] += ph * norm
        v = x / np.linalg.norm(x)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


# ---------------------------------------------------------------------------
# Complex single-shift QR on a Hessenberg matrix
# ---------------------------------------------------------------------------


def _givens_py(a, b):
    """c (real), s (complex) with [[c, s], [-conj s, c]] @ [a, b] = [r, 0]."""
    aa = abs(a)
    bb = abs(b)
    if bb == 0.0:
        return 1.0, 0j
    if aa == 0.0:
        return 0.0, np.conj(b) / bb
    nrm = np.hypot(aa, bb)
    ph = a / aa
    return aa / nrm, ph * np.conj(b) / nrm


def _wilkinson_py(a, b, c, d):
    """Eigenvalue of [[a, b], [c, d]] closest to d."""
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    m = 0.5 * (a + d)
    e1 = m + disc
    e2 = m - disc
    if abs(e1 - d) <= abs(e2 - d):
        return e1
    return e2


_givens = njit(_givens_py)
_wilkinson = njit(_wilkinson_py)


@njit
def _schur_nb(H, Z, defl_abs, max_iter):
    """Reduce Hessenberg ``H`` to upper-triangular Schur form in place.

    Returns ``(H, Z, hi)`` where ``hi`` is -1 on success, otherwise the
    index of the last unconverged row (rows ``hi+1 ..`` have converged).
    """
    n = H.shape[0]
    eps = 2.220446049250313e-16
    hi = n - 1
    its = 0
    local = 0
    while hi >= 0:
        # locate the start of the active unreduced block
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            if sub <= defl_abs or sub <= eps * (abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            local = 0
            continue
        if its >= max_iter:
            return H, Z, hi
        its += 1
        local += 1
        if local % 11 == 10:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1].real)
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        x = H[lo, lo] - mu
        y = H[lo + 1, lo]
        for k in range(lo, hi):
            c, s = _givens(x, y)
            # rows k, k+1
            jstart = k - 1 if k > lo else lo
            for j in range(jstart, n):
                h1 = H[k, j]
                h2 = H[k + 1, j]
                H[k, j] = c * h1 + s * h2
                H[k + 1, j] = -np.conj(s) * h1 + c * h2
            # columns k, k+1
            iend = min(k + 2, hi)
            for i in range(0, iend + 1):
                h1 = H[i, k]
                h2 = H[i, k + 1]
                H[i, k] = c * h1 + np.conj(s) * h2
                H[i, k + 1] = -s * h1 + c * h2
            for i in range(n):
                z1 = Z[i, k]
                z2 = Z[i, k + 1]
                Z[i, k] = c * z1 + np.conj(s) * z2
                Z[i, k + 1] = -s * z1 + c * z2
            if k > lo:
                H[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x = H[k + 1, k]
                y = H[k + 2, k]
    return H, Z, -1


def _schur_np(H, Z, defl_abs, max_iter):
    n = H.shape[0]
    eps = np.finfo(float).eps
    hi = n - 1
    its = 0
    local = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            if sub <= defl_abs or sub <= eps * (abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            local = 0
            continue
        if its >= max_iter:
            return H, Z, hi
        its += 1
        local += 1
        if local % 11 == 10:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1].real)
        else:
            mu = _wilkinson_py(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        x = H[lo, lo] - mu
        y = H[lo + 1, lo]
        for k in range(lo, hi):
            c, s = _givens_py(x, y)
            G = np.array([[c, s], [-np.conj(s), c]])
            jstart = k - 1 if k > lo else lo
            H[k:k + 2, jstart:] = G @ H[k:k + 2, jstart:]
            iend = min(k + 2, hi) + 1
            Gh = G.conj().T
            H[:iend, k:k + 2] = H[:iend, k:k + 2] @ Gh
            Z[:, k:k + 2] = Z[:, k:k + 2] @ Gh
            if k > lo:
                H[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x = H[k + 1, k]
                y = H[k + 2, k]
    return H, Z, -1


# ---------------------------------------------------------------------------
# Eigenvectors of an upper-triangular matrix
# ---------------------------------------------------------------------------


@njit
def _triangular_vectors_nb(T, smin):
    """Right (columns of X) and left (columns of Y) eigenvectors of T."""
    n = T.shape[0]
    X = np.zeros((n, n), dtype=np.complex128)
    Y = np.zeros((n, n), dtype=np.complex128)
    for k in range(n):
        lam = T[k, k]
        X[k, k] = 1.0
        for i in range(k - 1, -1, -1):
            acc = 0j
            for j in range(i + 1, k + 1):
                acc += T[i, j] * X[j, k]
            d = T[i, i] - lam
            if abs(d) < smin:
                d = smin + 0j
            X[i, k] = -acc / d
        nrm = 0.0
        for i in range(k + 1):
            nrm += abs(X[i, k]) ** 2
        nrm = np.sqrt(nrm)
        for i in range(k + 1):
            X[i, k] /= nrm
        # left: conj(T)^T y = conj(lam) y, lower triangular solve
        Y[k, k] = 1.0
        for i in range(k + 1, n):
            acc = 0j
            for j in range(k, i):
                acc += np.conj(T[j, i]) * Y[j, k]
            d = np.conj(T[i, i] - lam)
            if abs(d) < smin:
                d = smin + 0j
            Y[i, k] = -acc / d
        nrm = 0.0
        for i in range(k, n):
            nrm += abs(Y[i, k]) ** 2
        nrm = np.sqrt(nrm)
        for i in range(k, n):
            Y[i, k] /= nrm
    return X, Y


def _triangular_vectors_np(T, smin):
    n = T.shape[0]
    lam = np.diag(T).copy()
    X = np.zeros((n, n), dtype=np.complex128)
    Y = np.zeros((n, n), dtype=np.complex128)
    np.fill_diagonal(X, 1.0)
    np.fill_diagonal(Y, 1.0)
    cols = np.arange(n)
    for i in range(n - 2, -1, -1):
        # columns k > i
        ks = cols[i + 1:]
        acc = T[i, i + 1:] @ X[i + 1:, ks]
        d = T[i, i] - lam[ks]
        d = np.where(np.abs(d) < smin, smin, d)
        X[i, ks] = -acc / d
    for i in range(1, n):
        ks = cols[:i]
        acc = np.conj(T[:i, i]) @ Y[:i, ks]
        d = np.conj(T[i, i] - lam[ks])
        d = np.where(np.abs(d) < smin, smin, d)
        Y[i, ks] = -acc / d
    X /= np.linalg.norm(X, axis=0)
    Y /= np.linalg.norm(Y, axis=0)
    return X, Y
