"""Fuzzy Laplace-Beltrami superoperator and comparison with classical modes.

Matrices ``F`` are vectorized row-major, so ``vec(A F) = (A kron I) vec F``
and ``vec(F A) = (I kron A^T) vec F``.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from ..constants import DEFAULTS
from ..errors import DegenerateModeError, DimensionError, MemoryGuardError
from ..geometry import (ClassicalMode, fitted_mu2, laplace_apply, mode_grid,
                        relative_residual)
from ..group.algebra import GridFunction
from ..numerics import eig_general
from ..representation import RepOperators
from .quantization import dequantize
from .states import CoherentFamily


def ad(A: np.ndarray) -> np.ndarray:
    """Matrix of ``F -> [A, F]`` on row-major vectorized F."""
    n = A.shape[0]
    eye = np.eye(n)
    return np.kron(A, eye) - np.kron(eye, A.T)


def laplacian_action(ops: RepOperators, F: np.ndarray, D: int = None) -> np.ndarray:
    """``L0(F) = -[X0,[X0,F]] - i(D-1)[X0,F] + sum_k [X_k,[X_k,F]]``."""
    D = ops.D if D is None else D
    X0 = ops.X0
    c0 = X0 @ F - F @ X0
    out = -(X0 @ c0 - c0 @ X0) - 1j * (D - 1) * c0
    for X in ops.Xk:
        c = X @ F - F @ X
        out = out + (X @ c - c @ X)
    return out


def fuzzy_laplacian(ops: RepOperators, D: int = None, mu2=None, *, max_dim=None) -> np.ndarray:
    """Dense ``n^2 x n^2`` matrix of ``L0`` (plus ``mu2`` times identity if given).

    The eigenproblem ``L0(F) = -mu^2 F`` is the fuzzy counterpart of the
    classical mode equation.  Raises :class:`MemoryGuardError` when
    ``n^2`` exceeds ``max_dim`` (default 4096).
    """
    D = ops.D if D is None else int(D)
    if D != ops.D:
        raise DimensionError(f"operators are for D = {ops.D}")
    n = ops.dim
    limit = DEFAULTS.superoperator_max_dim if max_dim is None else max_dim
    if n * n > limit:
        raise MemoryGuardError(f"superoperator of size {n * n} exceeds the limit {limit}")
    A0 = ad(ops.X0)
    L = -(A0 @ A0) - 1j * (D - 1) * A0
    for X in ops.Xk:
        Ak = ad(X)
        L = L + Ak @ Ak
    if mu2 is not None:
        L = L + complex(mu2) * np.eye(n * n)
    return L


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class ModeMatch:
    """One dequantized eigen-matrix and its best classical partner."""

    index: int
    eigenvalue: complex
    mu2: complex
    overlap: float
    lam: list
    kind: int
    coefficient: complex
    residual: float
    fitted_mu2: complex
    fock_weight: float
    matched: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("eigenvalue", "mu2", "coefficient", "fitted_mu2"):
            z = complex(d[key])
            d[key] = [z.real, z.imag]
        return d


@dataclass
class SpectralReport:
    """Eigenvalues, matched modes and truncation metadata of one solve."""

    D: int
    N: int
    eigenvalues: np.ndarray
    modes: list
    truncation: dict
    config: dict = field(default_factory=dict)
    fields: list = field(default_factory=list, repr=False)

    @property
    def best_overlap(self) -> float:
        return max((m.overlap for m in self.modes), default=0.0)

    @property
    def best_residual(self) -> float:
        return min((m.residual for m in self.modes), default=float("inf"))

    def to_dict(self) -> dict:
        ev = np.asarray(self.eigenvalues)
        return {
            "D": self.D,
            "N": self.N,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in ev],
            "modes": [m.to_dict() for m in self.modes],
            "best_overlap": self.best_overlap,
            "best_residual": self.best_residual,
            "truncation": self.truncation,
            "config_hash": config_hash(self.config),
        }

    def to_json(self, path) -> None:
        atomic_write(path, json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def write_mode_tables(self, directory, prefix="mode") -> list:
        """One CSV per matched mode: ``t, y1.., re, im, residual_re, residual_im``."""
        paths = []
        for m, (f, r) in zip(self.modes, self.fields):
            path = os.path.join(directory, f"{prefix}_{m.index:04d}.csv")
            mesh = np.meshgrid(f.t, *f.y, indexing="ij")
            cols = ["t"] + [f"y{k + 1}" for k in range(len(f.y))] + ["re", "im", "residual_re", "residual_im"]
            flat = [a.ravel() for a in mesh] + [f.values.real.ravel(), f.values.imag.ravel(),
                                                r.values.real.ravel(), r.values.imag.ravel()]
            lines = [",".join(cols)]
            lines += [",".join(repr(float(v)) for v in row) for row in zip(*flat)]
            atomic_write(path, "\n".join(lines) + "\n")
            paths.append(path)
        return paths


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def atomic_write(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# spectral solve and matching
# ---------------------------------------------------------------------------


def default_lambda_grid(n: int = 40, lo: float = 0.02, hi: float = 6.0) -> np.ndarray:
    g = np.geomspace(lo, hi, n)
    return np.concatenate([-g[::-1], g])


def _is_identity_like(F: np.ndarray) -> bool:
    n = F.shape[0]
    rest = F - np.trace(F) / n * np.eye(n)
    return np.linalg.norm(rest) < DEFAULTS.identity_mode * np.linalg.norm(F)


def _best_classical(f: GridFunction, mu2: complex, direction: np.ndarray, lam_grid) -> tuple:
    """Best overlap of ``f`` with classical modes ``lam = l * direction``, both kinds."""
    D = f.D
    fnorm = np.linalg.norm(f.values)
    best = (-1.0, None, None, 0j, np.inf)
    for kind in (1, 2):
        for l in lam_grid:
            try:
                m = ClassicalMode(D, mu2, l * direction, kind)
                g = mode_grid(m, f.t, *f.y)
            except DegenerateModeError:
                continue
            gn = np.linalg.norm(g.values)
            if not np.isfinite(gn) or gn == 0:
                continue
            ip = np.vdot(g.values, f.values)
            ov = float(abs(ip) / (gn * fnorm))
            if ov > best[0] + 1e-12:
                best = (ov, float(l), kind, ip / gn ** 2, None)
            elif abs(ov - best[0]) <= 1e-12:
                # tie: prefer the candidate with the smaller classical residual
                r_new = relative_residual(g, mu2)
                r_old = best[4]
                if r_old is None:
                    prev = ClassicalMode(D, mu2, best[1] * direction, best[2])
                    r_old = relative_residual(mode_grid(prev, f.t, *f.y), mu2)
                if r_new < r_old:
                    best = (ov, float(l), kind, ip / gn ** 2, r_new)
    return best


def mode_compare(eig, family: CoherentFamily, *, n_modes: int = 12, lam_grid=None,
                 direction=None, overlap_floor=None, config=None) -> SpectralReport:
    """Dequantize the lowest-``|mu^2|`` eigen-matrices and match them to classical modes.

    ``eig`` is an :class:`~kappa_fuzzy.numerics.EigResult` (or a ``(w, V)``
    pair) of :func:`fuzzy_laplacian`.  The identity eigen-matrix is skipped.
    Each kept mode records the normalized overlap with the best classical
    mode (searching ``lam_grid`` along ``direction`` and both Hankel
    kinds), the relative residual of the dequantized field under the
    classical operator at the fuzzy ``mu^2``, and the least-squares
    ``mu^2`` of the field.  Modes below ``overlap_floor`` are flagged
    unmatched.
    """
    w = np.asarray(eig[0] if isinstance(eig, tuple) else eig.eigenvalues)
    V = np.asarray(eig[1] if isinstance(eig, tuple) else eig.vectors)
    n = family.dim
    D = family.D
    floor = DEFAULTS.overlap_floor if overlap_floor is None else overlap_floor
    lam_grid = default_lambda_grid() if lam_grid is None else np.asarray(lam_grid, float)
    if direction is None:
        label = family.ops.label.get("lambda")
        direction = np.asarray(label if label is not None else [1.0] + [0.0] * (D - 2), float)
    direction = np.asarray(direction, float)
    order = np.lexsort((np.round(w.imag, 12), np.round(w.real, 12), np.round(np.abs(w), 9)))
    modes, fields = [], []
    for idx in order:
        if len(modes) >= n_modes:
            break
        F = V[:, idx].reshape(n, n)
        if _is_identity_like(F):
            continue
        f = dequantize(F, family)
        if not isinstance(f, GridFunction) or np.linalg.norm(f.values) == 0:
            continue
        mu2 = -complex(w[idx])
        ov, l, kind, coef, _ = _best_classical(f, mu2, direction, lam_grid)
        res = relative_residual(f, mu2)
        half = n // 2
        fock = float(np.linalg.norm(F[:half, :half]) ** 2 / np.linalg.norm(F) ** 2)
        modes.append(ModeMatch(int(idx), complex(w[idx]), mu2, ov,
                               (l * direction).tolist() if l is not None else [], kind or 0,
                               complex(coef), res, fitted_mu2(f), fock, ov >= floor))
        fields.append((f, laplace_apply(f, mu2)))
    trunc = {}
    return SpectralReport(D, n, w[order], modes, trunc, dict(config or {}), fields)


def spectral_report(ops: RepOperators, family: CoherentFamily, **kwargs) -> SpectralReport:
    """Assemble, solve with :func:`eig_general`, and compare."""
    from ..representation import commutator_deviation

    L = fuzzy_laplacian(ops)
    eig = eig_general(L)
    rep = mode_compare(eig, family, **kwargs)
    rep.truncation = {
        "commutator_deviation": commutator_deviation(ops),
        "nu_principal": "sqrt(((D-1)/2)^2 - mu^2)",
        "ill_conditioned": int(np.sum(eig.ill_conditioned)),
        "defective": int(np.sum(eig.defective)),
    }
    return rep
