"""Invariant frames, right-invariant metrics, the de Sitter embedding and
the Laplace-Beltrami operator in planar coordinates.

Coordinates are split coordinates ``x = (t, y^1, ..., y^{D-1})``.  Frames
are stored as coefficient matrices: a one-form ``theta^mu`` is the row
``forms[mu, :]`` (``theta^mu = forms[mu, a] dx^a``) and a vector field
``e_nu`` is the row ``fields[nu, :]`` (``e_nu = fields[nu, a] d_a``).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModeError, DimensionError, FlatCaseError, PreconditionError
from .group.algebra import GridFunction
from .group.elements import SplitElement
from .numerics import eig_hermitian, fin_diff
from .special import hankel

# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------


def _forms_fields(side: str, t: float, y: np.ndarray):
    D = y.size + 1
    forms = np.eye(D)
    fields = np.eye(D)
    if side == "right":
        forms[1:, 1:] *= np.exp(t)
        fields[1:, 1:] *= np.exp(-t)
    elif side == "left":
        # theta^k = dy^k + y^k dt ; e_0 = d_t - y^k d_k, e_k = d_k
        forms[1:, 0] = y
        fields[0, 1:] = -y
    else:
        raise ValueError(f"side must be 'right' or 'left', got {side!r}")
    return forms, fields


@dataclass(frozen=True, eq=False)
class FramePoint:
    point: SplitElement
    side: str
    forms: np.ndarray
    fields: np.ndarray

    def pairing(self) -> np.ndarray:
        """Matrix ``theta^mu(e_nu)``; the identity for a dual frame."""
        return self.forms @ self.fields.T


def frame_at(p: SplitElement, side: str = "right") -> FramePoint:
    forms, fields = _forms_fields(side, p.t, p.y)
    return FramePoint(p, side, forms, fields)


def structure_constants(side: str, D: int) -> np.ndarray:
    """``C[mu, nu]`` = expected vector ``[e_mu, e_nu]`` in the frame basis.

    Returned as an array of shape ``(D, D, D)`` with ``[e_mu, e_nu] =
    C[mu, nu, rho] e_rho``.
    """
    C = np.zeros((D, D, D))
    sign = -1.0 if side == "right" else 1.0
    for k in range(1, D):
        C[0, k, k] = sign
        C[k, 0, k] = -sign
    return C


def _field_coeffs(side, x):
    forms, fields = _forms_fields(side, x[0], np.asarray(x[1:]))
    return fields


@dataclass(frozen=True)
class BracketReport:
    side: str
    h: float
    max_deviation: float
    deviations: dict


def bracket_check(side: str, p: SplitElement, h: float = 1e-4) -> BracketReport:
    """Compare finite-difference Lie brackets of the frame with the algebra.

    ``[X, Y]^a = X^b d_b Y^a - Y^b d_b X^a`` where the coordinate
    derivatives of the field coefficients use the central O(h^2) stencil.
    """
    if not 1e-6 <= h <= 1e-2:
        raise PreconditionError("h must lie in [1e-6, 1e-2]")
    x = p.as_array()
    D = x.size
    E = _field_coeffs(side, x)
    dE = np.empty((D, D, D))  # dE[b, nu, a] = d_b (e_nu)^a
    for b in range(D):
        step = np.zeros(D)
        step[b] = h
        dE[b] = (_field_coeffs(side, x + step) - _field_coeffs(side, x - step)) / (2 * h)
    C = structure_constants(side, D)
    devs = {}
    for mu in range(D):
        for nu in range(mu + 1, D):
            br = E[mu] @ dE[:, nu, :] - E[nu] @ dE[:, mu, :]
            expected = C[mu, nu] @ E
            devs[(mu, nu)] = float(np.max(np.abs(br - expected)))
    return BracketReport(side, h, max(devs.values(), default=0.0), devs)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MetricSpec:
    """Frame components ``G`` of the right-invariant metric ``g_{mu nu} theta^mu theta^nu``."""

    G: np.ndarray

    def __post_init__(self):
        G = np.array(self.G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 2:
            raise DimensionError("G must be a square matrix of size >= 2")
        if np.max(np.abs(G - G.T)) > 1e-12 * max(1.0, np.max(np.abs(G))):
            raise PreconditionError("G must be symmetric")
        G = 0.5 * (G + G.T)
        if abs(np.linalg.det(G)) <= 1e-12:
            raise PreconditionError("G is degenerate")
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @property
    def D(self) -> int:
        return self.G.shape[0]

    @property
    def signature(self) -> tuple:
        w, _ = eig_hermitian(self.G)
        return int(np.sum(w > 0)), int(np.sum(w < 0))

    @classmethod
    def planar(cls, D: int) -> "MetricSpec":
        return cls(np.diag([1.0] + [-1.0] * (D - 1)))


def metric_at(spec: MetricSpec, p: SplitElement) -> np.ndarray:
    """Coordinate components ``Theta^T G Theta`` of the metric at ``p``."""
    if p.D != spec.D:
        raise DimensionError("point and metric dimensions differ")
    forms, _ = _forms_fields("right", p.t, p.y)
    return forms.T @ spec.G @ forms


def _metric_coords(spec, x):
    forms, _ = _forms_fields("right", x[0], np.asarray(x[1:]))
    return forms.T @ spec.G @ forms


def killing_check(spec: MetricSpec, p: SplitElement, side: str = "left", h: float = 1e-4) -> float:
    """Max |L_K g| over the frame fields ``K`` of ``side``, relative to |g|.

    The right-invariant metric is preserved by right translations, whose
    generators are the left-invariant fields; ``side="left"`` therefore
    returns a number at finite-difference level, while ``side="right"``
    generally does not.
    """
    x = p.as_array()
    D = x.size
    g = _metric_coords(spec, x)
    dg = np.empty((D, D, D))
    dK = np.empty((D, D, D))  # dK[b, nu, a] = d_b K_nu^a
    for b in range(D):
        step = np.zeros(D)
        step[b] = h
        dg[b] = (_metric_coords(spec, x + step) - _metric_coords(spec, x - step)) / (2 * h)
        dK[b] = (_field_coeffs(side, x + step) - _field_coeffs(side, x - step)) / (2 * h)
    K = _field_coeffs(side, x)
    worst = 0.0
    for nu in range(D):
        k = K[nu]
        # (L_K g)_ab = K^c d_c g_ab + g_cb d_a K^c + g_ac d_b K^c
        lie = np.einsum("c,cab->ab", k, dg) + dK[:, nu, :] @ g + g @ dK[:, nu, :].T
        worst = max(worst, float(np.max(np.abs(lie))))
    return worst / float(np.max(np.abs(g)))


def random_lorentzian_spec(D: int, rng: np.random.Generator) -> MetricSpec:
    """Random Lorentzian right-invariant metric with definite spatial block.

    Draws a negative-definite spatial block ``G_s``, a random mixed row
    ``g_0`` and a ``g_00`` above ``g_0^T G_s^{-1} g_0``, then flips the
    overall sign half of the time (mostly-plus convention).
    """
    B = rng.normal(size=(D - 1, D - 1))
    Gs = -(B @ B.T + 0.2 * np.eye(D - 1))
    g0 = rng.normal(size=D - 1)
    g00 = g0 @ np.linalg.solve(Gs, g0) + rng.uniform(0.2, 2.0)
    G = np.empty((D, D))
    G[0, 0] = g00
    G[0, 1:] = G[1:, 0] = g0
    G[1:, 1:] = Gs
    if rng.random() < 0.5:
        G = -G
    return MetricSpec(G)


@dataclass(frozen=True, eq=False)
class Reduction2D:
    """The two-branch transformation of the one-parameter 2-D metric family.

    ``apply(tau, x)`` returns ``(tau', x')``; the planar metric
    ``(dtau'^2 - dx'^2)/tau'^2`` pulls back to ``scale`` times the family
    metric, with ``scale = cos(2 theta)`` (negative on the second branch,
    which is the overall sign flip).
    """

    theta: float
    scale: float
    jacobian: np.ndarray  # constant: d(tau', x')/d(tau, x)

    def apply(self, tau, x):
        tau = np.asarray(tau, float)
        x = np.asarray(x, float)
        J = self.jacobian
        return J[0, 0] * tau + J[0, 1] * x, J[1, 0] * tau + J[1, 1] * x

    def family_metric(self, tau) -> np.ndarray:
        c, s = np.cos(2 * self.theta), np.sin(2 * self.theta)
        return np.array([[c, s], [s, -c]]) / np.asarray(tau, float)[..., None, None] ** 2

    def pullback(self, tau) -> np.ndarray:
        tau_p = self.jacobian[0, 0] * np.asarray(tau, float)
        planar = np.diag([1.0, -1.0]) / tau_p[..., None, None] ** 2
        J = self.jacobian
        return np.einsum("ia,...ij,jb->...ab", J, planar, J)

    def residual(self, tau) -> float:
        """max |pullback - scale * family| / max |scale * family| at ``tau``."""
        target = self.scale * self.family_metric(tau)
        return float(np.max(np.abs(self.pullback(tau) - target)) / np.max(np.abs(target)))


def reduce_metric_2d(theta: float) -> Reduction2D:
    """Map bringing ``(cos2θ dτ² + 2 sin2θ dτ dx − cos2θ dx²)/τ²`` to planar form."""
    if not (-np.pi / 4 < theta <= 3 * np.pi / 4):
        raise PreconditionError("theta must lie in (-pi/4, 3pi/4]")
    if np.isclose(theta, np.pi / 4, rtol=0, atol=1e-12) or np.isclose(theta, 3 * np.pi / 4, rtol=0, atol=1e-12):
        raise FlatCaseError("theta = pi/4 or 3pi/4 gives a flat metric, which is not reduced")
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    r = np.sqrt(abs(c))
    sign = -1.0 if theta < np.pi / 4 else 1.0
    J = np.array([[1.0 / r, 0.0], [sign * s / r, r]])
    return Reduction2D(float(theta), float(c), J)


@dataclass(frozen=True, eq=False)
class MetricReduction:
    """Linear map ``(tau', y') = L (tau, y)`` with ``tau = e^{-t}``.

    The planar metric ``(dtau'^2 -+ |dy'|^2)/tau'^2`` pulls back through
    ``L`` to ``scale`` times the input metric.  ``L`` is assembled from a
    spatial rotation aligning the mixed row, a rotation diagonalizing the
    completed spatial block, spatial scalings and a shear ``tau``-term:
    ``steps`` keeps each factor.
    """

    spec: MetricSpec
    L: np.ndarray
    scale: float
    euclidean: bool
    steps: dict

    def apply(self, t, y):
        """Map split coordinates ``(t, y)`` to ``(t', y')``."""
        tau = np.exp(-np.asarray(t, float))
        v = np.concatenate([np.atleast_1d(tau)[..., None], np.atleast_2d(y)], axis=-1)
        w = v @ self.L.T
        return -np.log(w[..., 0]), w[..., 1:]

    def input_metric(self, tau) -> np.ndarray:
        """The input metric in ``(tau, y)`` coordinates."""
        G = self.spec.G
        m = G.copy()
        m[0, 1:] = m[1:, 0] = -G[0, 1:]
        return m / np.asarray(tau, float)[..., None, None] ** 2

    def pullback(self, tau) -> np.ndarray:
        D = self.spec.D
        eta = np.diag([1.0] + [1.0 if self.euclidean else -1.0] * (D - 1))
        tau_p = self.L[0, 0] * np.asarray(tau, float)
        return np.einsum("ia,ij,jb->ab", self.L, eta, self.L)[None] / tau_p[..., None, None] ** 2

    def residual(self, tau) -> float:
        target = self.scale * self.input_metric(np.atleast_1d(tau))
        diff = self.pullback(np.atleast_1d(tau)) - target
        return float(np.max(np.abs(diff)) / np.max(np.abs(target)))


def _rotation_to_axis(v: np.ndarray) -> np.ndarray:
    """Proper rotation R with ``R v = |v| e_1`` (identity when v = 0)."""
    n = v.size
    norm = np.linalg.norm(v)
    if n == 1 or norm == 0.0:
        return np.eye(n)
    u = v / norm
    w = u - np.eye(n)[0]
    if np.linalg.norm(w) < 1e-14:
        return np.eye(n)
    w /= np.linalg.norm(w)
    R = np.eye(n) - 2.0 * np.outer(w, w)  # reflection swapping u and e_1
    # make it a rotation: flip a direction orthogonal to e_1
    R[-1, :] *= -1.0
    return R


def reduce_metric_general(spec: MetricSpec, *, euclidean: bool = False) -> MetricReduction:
    """Reduce a right-invariant metric to planar de Sitter form.

    Lorentzian metrics need exactly one eigenvalue of one sign; both sign
    conventions are accepted and end up in the returned ``scale``.  The
    reduction also needs a definite spatial block ``G[1:, 1:]``: when it
    is indefinite (possible for D >= 3) the metric has constant curvature
    of the opposite sign (an anti-de Sitter type space) and no real linear
    map exists, so a :class:`PreconditionError` is raised.

    ``euclidean=True`` handles definite ``G`` and targets
    ``(dtau^2 + |dy|^2)/tau^2``.
    """
    D = spec.D
    npos, nneg = spec.signature
    if euclidean:
        if min(npos, nneg) != 0:
            raise PreconditionError(f"euclidean reduction needs a definite metric, got {(npos, nneg)}")
    elif sorted((npos, nneg)) != [1, D - 1] or D < 2:
        raise PreconditionError(f"Lorentzian signature required, got {(npos, nneg)}")
    G = spec.G
    g00, g0, Gs = G[0, 0], G[0, 1:], G[1:, 1:]
    if abs(np.linalg.det(Gs)) < 1e-12:
        raise PreconditionError("spatial block is degenerate (flat case)")
    schur = g00 - g0 @ np.linalg.solve(Gs, g0)
    scale = 1.0 / schur
    M = (scale if euclidean else -scale) * Gs  # must be positive definite
    R1 = _rotation_to_axis(g0)
    Mrot = R1 @ M @ R1.T
    ev, R2 = eig_hermitian(Mrot)
    ev = np.real(ev)
    R2 = np.real(R2)
    if np.min(ev) <= 0:
        raise PreconditionError(
            "spatial block is indefinite relative to the time direction: the metric is of "
            "anti-de Sitter type and cannot be brought to planar de Sitter form")
    A = np.diag(np.sqrt(ev)) @ R2.T @ R1
    b = (-scale if euclidean else scale) * np.linalg.solve(A.T, g0)
    L = np.zeros((D, D))
    L[0, 0] = 1.0
    L[1:, 0] = b
    L[1:, 1:] = A
    steps = {"rotation_align": R1, "rotation_diagonalize": R2.T,
             "scalings": np.sqrt(ev), "shear": b}
    return MetricReduction(spec, L, float(scale), euclidean, steps)


# ---------------------------------------------------------------------------
# embedding
# ---------------------------------------------------------------------------

AMBIENT_ETA = "diag(1, -1, ..., -1)"


def embed(t, y) -> np.ndarray:
    """Planar-chart embedding into (D+1)-dimensional Minkowski space.

    Broadcasts over leading axes of ``t`` (shape ``S``) and ``y``
    (shape ``S + (D-1,)``); returns shape ``S + (D+1,)``.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    et = np.exp(t)
    q = 0.5 * et * np.sum(y * y, axis=-1)
    X0 = np.sinh(t) + q
    XD = np.cosh(t) - q
    return np.concatenate([X0[..., None], et[..., None] * y, XD[..., None]], axis=-1)


def embed_printed(t, y) -> np.ndarray:
    """The embedding with the quadratic term entering X^0 and X^D alike.

    Kept only as a diagnostic: it violates the hyperboloid constraint by
    ``|y|^2 (1 + e^{2t})``.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    et = np.exp(t)
    q = 0.5 * et * np.sum(y * y, axis=-1)
    X0 = -np.sinh(t) - q
    XD = -np.cosh(t) - q
    return np.concatenate([X0[..., None], et[..., None] * y, XD[..., None]], axis=-1)


def quadric(X) -> np.ndarray:
    """``-(X^0)^2 + sum_k (X^k)^2 + (X^D)^2``; equals 1 on de Sitter space."""
    X = np.asarray(X, float)
    return -X[..., 0] ** 2 + np.sum(X[..., 1:] ** 2, axis=-1)


def quadric_residual(X) -> np.ndarray:
    """|quadric - 1| divided by ``max(1, |X|^2)`` (the rounding scale)."""
    X = np.asarray(X, float)
    return np.abs(quadric(X) - 1.0) / np.maximum(1.0, np.sum(X * X, axis=-1))


def embedding_jacobian(t, y) -> np.ndarray:
    """Analytic ``dX^A / dx^a``, shape ``S + (D+1, D)``."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    D = y.shape[-1] + 1
    et = np.exp(t)
    q = 0.5 * et * np.sum(y * y, axis=-1)
    J = np.zeros(t.shape + (D + 1, D))
    J[..., 0, 0] = np.cosh(t) + q
    J[..., 1:D, 0] = et[..., None] * y
    J[..., D, 0] = np.sinh(t) - q
    J[..., 0, 1:] = et[..., None] * y
    J[..., 1:D, 1:] = et[..., None, None] * np.eye(D - 1)
    J[..., D, 1:] = -et[..., None] * y
    return J


def induced_metric(t, y) -> np.ndarray:
    """``J^T eta J`` with ambient ``eta = diag(1, -1, ..., -1)``."""
    J = embedding_jacobian(t, y)
    n = J.shape[-2]
    eta = -np.eye(n)
    eta[0, 0] = 1.0
    return np.einsum("...Aa,AB,...Bb->...ab", J, eta, J)


# ---------------------------------------------------------------------------
# Laplace-Beltrami operator and classical modes
# ---------------------------------------------------------------------------


def _laplace_terms(f: GridFunction, accuracy: int = 4):
    vals = f.values
    ht = f.steps[0]
    ft = fin_diff(vals, 1, accuracy, ht, axis=0)
    ftt = fin_diff(vals, 2, accuracy, ht, axis=0)
    lap = np.zeros_like(vals)
    for k, hy in enumerate(f.steps[1:]):
        lap = lap + fin_diff(vals, 2, accuracy, hy, axis=k + 1)
    shape = (-1,) + (1,) * (vals.ndim - 1)
    damp = np.exp(-2.0 * f.t).reshape(shape)
    return ftt, ft, damp * lap


def laplace_apply(f: GridFunction, mu2, *, accuracy: int = 4) -> GridFunction:
    """Residual ``(d_t^2 + (D-1) d_t + mu^2 - e^{-2t} Delta_y) f`` on the grid.

    Boundary rows use one-sided stencils of the same order.
    """
    if min(f.values.shape) < accuracy + 2:
        raise DimensionError("grid too small for the stencil")
    ftt, ft, spatial = _laplace_terms(f, accuracy)
    res = ftt + (f.D - 1) * ft + mu2 * f.values - spatial
    return f.with_values(res)


def relative_residual(f: GridFunction, mu2, *, margin: int = 2, accuracy: int = 4) -> float:
    """Interior residual norm over the norm of the separate operator terms.

    Uses 2-norms over the points at least ``margin`` away from every edge.
    """
    ftt, ft, spatial = _laplace_terms(f, accuracy)
    res = ftt + (f.D - 1) * ft + mu2 * f.values - spatial
    inner = tuple(slice(margin, -margin) for _ in range(f.values.ndim))
    scale = (np.abs(ftt) + (f.D - 1) * np.abs(ft) + np.abs(mu2 * f.values) + np.abs(spatial))[inner]
    denom = np.linalg.norm(scale)
    return float(np.linalg.norm(res[inner]) / denom) if denom > 0 else 0.0


def fitted_mu2(f: GridFunction, *, margin: int = 2, accuracy: int = 4) -> complex:
    """Least-squares mu^2 making the residual of ``f`` smallest."""
    ftt, ft, spatial = _laplace_terms(f, accuracy)
    inner = tuple(slice(margin, -margin) for _ in range(f.values.ndim))
    K = (ftt + (f.D - 1) * ft - spatial)[inner].ravel()
    v = f.values[inner].ravel()
    return complex(-np.vdot(v, K) / np.vdot(v, v))


def order_from_mu2(D: int, mu2) -> complex:
    """Principal square root of ((D-1)/2)^2 - mu^2."""
    return complex(np.sqrt(complex(((D - 1) / 2) ** 2 - mu2)))


@dataclass(frozen=True, eq=False)
class ClassicalMode:
    """Mode ``e^{i lam.y} e^{(1-D)t/2} H^{(kind)}_nu(|lam| e^{-t})``.

    ``mu2`` may be complex when the mode is matched to a non-Hermitian
    fuzzy eigenvalue; ``nu`` is always the principal root.
    """

    D: int
    mu2: complex
    lam: np.ndarray
    kind: int = 1

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float).reshape(-1)
        if lam.size != self.D - 1:
            raise DimensionError(f"lambda needs {self.D - 1} components")
        if np.linalg.norm(lam) == 0.0:
            raise DegenerateModeError("lambda = 0: the Hankel function is singular at 0")
        if self.kind not in (1, 2):
            raise ValueError("kind must be 1 or 2")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu2", complex(self.mu2))

    @classmethod
    def from_order(cls, D, nu, lam, kind=1) -> "ClassicalMode":
        return cls(D, ((D - 1) / 2) ** 2 - complex(nu) ** 2, lam, kind)

    @property
    def nu(self) -> complex:
        return order_from_mu2(self.D, self.mu2)

    @property
    def lam_norm(self) -> float:
        return float(np.linalg.norm(self.lam))


def classical_mode(m: ClassicalMode, t, y):
    """Evaluate the mode at split coordinates (arrays broadcast).

    ``y`` has a trailing axis of length D-1.  Returns complex values of the
    broadcast shape of ``t`` and ``y[..., 0]``.
    """
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    phase = np.exp(1j * (y @ m.lam))
    t_b = np.broadcast_to(t, phase.shape)
    # Hankel depends on t only: evaluate on the distinct t values
    tu, inv = np.unique(t_b, return_inverse=True)
    h = hankel(m.kind, m.nu, m.lam_norm * np.exp(-tu))
    radial = (np.exp((1 - m.D) / 2 * tu) * h)[inv].reshape(phase.shape)
    return phase * radial


def mode_grid(m: ClassicalMode, t, *y) -> GridFunction:
    """Sample a classical mode on a tensor grid."""
    mesh = np.meshgrid(np.asarray(t, float), *[np.asarray(a, float) for a in y], indexing="ij")
    Y = np.stack(mesh[1:], axis=-1)
    return GridFunction(t, tuple(y), classical_mode(m, mesh[0], Y))


def write_mode_table(path, f: GridFunction, residual: GridFunction) -> None:
    """CSV with columns ``t, y1.., re, im, residual_re, residual_im``."""
    mesh = np.meshgrid(f.t, *f.y, indexing="ij")
    cols = ["t"] + [f"y{k + 1}" for k in range(len(f.y))] + ["re", "im", "residual_re", "residual_im"]
    flat = [m.ravel() for m in mesh] + [f.values.real.ravel(), f.values.imag.ravel(),
                                        residual.values.real.ravel(), residual.values.imag.ravel()]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for row in zip(*flat):
            w.writerow([repr(float(v)) for v in row])
