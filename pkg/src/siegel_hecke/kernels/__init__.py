"""Float hot loops with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time from ``SIEGEL_HECKE_BACKEND``
(``numba`` or ``numpy``; default numba when importable).  Both backends
expose identical functions, see ``_numpy`` for their contracts.
"""

from __future__ import annotations

import logging
import os

from . import _numpy

log = logging.getLogger(__name__)

KERNEL_NAMES = (
    "recurrence_table",
    "multiplicative_table",
    "dirichlet_convolve",
    "first_joint_nonzero",
    "min_abs_prefix",
    "sign_counts",
)


def _load_numba():
    try:
        from . import _numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        log.warning("numba unavailable, using numpy kernels")
        return None
    return _numba


def _select(name: str):
    name = name.strip().lower()
    if name == "numpy":
        return "numpy", _numpy
    if name == "numba":
        mod = _load_numba()
        if mod is not None:
            return "numba", mod
        return "numpy", _numpy
    raise ValueError(f"unknown kernel backend {name!r} (expected numba or numpy)")


BACKEND, _impl = _select(os.environ.get("SIEGEL_HECKE_BACKEND", "numba"))

recurrence_table = _impl.recurrence_table
multiplicative_table = _impl.multiplicative_table
dirichlet_convolve = _impl.dirichlet_convolve
first_joint_nonzero = _impl.first_joint_nonzero
min_abs_prefix = _impl.min_abs_prefix
sign_counts = _impl.sign_counts


def backend_module(name: str):
    """The kernel module for ``name`` regardless of the active backend."""
    return _select(name)[1]
