"""Kernel backend selection.

Two interchangeable implementations of the hot kernels live here: a
numba-jitted one and a pure-numpy one with identical random streams and
semantics.  Selection is controlled by environment variables read once,
at first use:

  PIVOTLAB_BACKEND   "auto" (default), "numba", or "numpy".  Under
                     "auto" the numba backend is used when it imports
                     cleanly, else numpy with a warning.  Asking for
                     "numba" explicitly raises if it cannot load.
  PIVOTLAB_THREADS   positive integer pinning the numba thread count;
                     0 or unset leaves numba's own default.

`use()` switches backends at runtime (tests and the benchmark need to
drive both).
"""

from __future__ import annotations

import os
import warnings

from . import _numpy_impl

BACKEND_ENV = "PIVOTLAB_BACKEND"
THREADS_ENV = "PIVOTLAB_THREADS"

_active = None


def _thread_request() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 0
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0, got {n}")
    return n


def _load_numba():
    import numba

    from . import _numba_impl

    n = _thread_request()
    if n:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return _numba_impl


def use(name: str):
    """Activate a backend by name ("numba" or "numpy") and return it."""
    global _active
    if name == "numpy":
        _active = _numpy_impl
    elif name == "numba":
        _active = _load_numba()
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")
    return _active


def get():
    """The active backend module, resolving the environment on first call."""
    global _active
    if _active is not None:
        return _active
    req = os.environ.get(BACKEND_ENV, "auto").strip().lower() or "auto"
    if req in ("numba", "numpy"):
        return use(req)
    if req != "auto":
        raise ValueError(
            f"{BACKEND_ENV} must be 'auto', 'numba', or 'numpy', got {req!r}"
        )
    try:
        _active = _load_numba()
    except Exception as exc:  # pragma: no cover - depends on install state
        warnings.warn(
            f"numba backend unavailable ({exc!r}); falling back to numpy",
            RuntimeWarning,
            stacklevel=2,
        )
        _active = _numpy_impl
    return _active


def active_name() -> str:
    return get().NAME
