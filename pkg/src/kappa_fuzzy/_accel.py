"""Backend selection for the compiled kernels.

Hot loops are written twice: a numba ``@njit`` version and a vectorized
numpy version.  Numba is used when it imports and the environment variable
``KAPPA_FUZZY_DISABLE_NUMBA`` is unset (or falsy).  Tests and the benchmark
switch backends at runtime with :func:`use_backend`.
"""
from __future__ import annotations

import contextlib
import os

_TRUTHY = {"1", "true", "yes", "on"}

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _numba = None

HAVE_NUMBA = _numba is not None
_disabled = os.environ.get("KAPPA_FUZZY_DISABLE_NUMBA", "").strip().lower() in _TRUTHY
_backend = "numba" if (HAVE_NUMBA and not _disabled) else "numpy"


def njit(fn=None, **options):
    """``numba.njit(cache=True)`` when numba is importable, else identity.

    Compilation is lazy, so decorating costs nothing when the numpy backend
    is selected.
    """
    def wrap(f):
        if not HAVE_NUMBA:
            return f
        opts = {"cache": True}
        opts.update(options)
        return _numba.njit(**opts)(f)

    return wrap(fn) if fn is not None else wrap


def jitable(fn):
    """Mark a helper callable both from Python and from ``@njit`` code.

    Called from Python it is the plain function (so it also works
    elementwise on numpy arrays); inside compiled kernels numba inlines a
    compiled copy.
    """
    if not HAVE_NUMBA:
        return fn
    from numba.extending import register_jitable

    return register_jitable(fn)


def backend() -> str:
    """Name of the active backend: ``"numba"`` or ``"numpy"``."""
    return _backend


def use_numba() -> bool:
    return _backend == "numba"


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    """Temporarily switch the kernel backend."""
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
