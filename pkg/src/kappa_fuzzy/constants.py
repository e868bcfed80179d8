"""Default tolerances.

Every numeric tolerance used as a default anywhere in the package lives
here.  Functions accept keyword overrides; the CLI forwards the
``tolerances`` section of a run config through :func:`with_overrides`.
"""
from __future__ import annotations

import dataclasses


@dataclasses.dataclass(frozen=True)
class Tolerances:
    # linear algebra
    hermitian_check: float = 1e-12
    qr_deflation: float = 1e-12
    qr_iteration_factor: int = 30
    jacobi_offdiag: float = 1e-15
    svd_truncation: float = 1e-10
    ill_conditioned: float = 1e8
    defective: float = 1e10
    # special functions
    series_tail: float = 1e-14
    near_integer: float = 1e-6
    integer_order_step: float = 1e-5
    # group algebra
    phi_taylor_cutoff: float = 1e-4
    window_edge: float = 1e-8
    support_skip: float = 1e-16
    # representation / fuzzy
    unit_vector: float = 1e-12
    state_norm: float = 1e-12
    mellin_tail: float = 1e-12
    overlap_floor: float = 0.5
    identity_mode: float = 1e-6
    superoperator_max_dim: int = 4096


DEFAULTS = Tolerances()


def with_overrides(overrides: dict | None) -> Tolerances:
    """Copy of the defaults with ``overrides`` applied; unknown keys raise."""
    if not overrides:
        return DEFAULTS
    names = {f.name for f in dataclasses.fields(Tolerances)}
    unknown = set(overrides) - names
    if unknown:
        raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
    return dataclasses.replace(DEFAULTS, **overrides)
