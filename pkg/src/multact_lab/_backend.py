"""Kernel backend selection.

Hot inner loops exist twice: a numba ``@njit`` version and a pure-numpy
version with identical signatures and identical results.  The active backend
is chosen once at import time from the ``MULTACT_BACKEND`` environment
variable:

* ``MULTACT_BACKEND=numba`` -- require numba, fail loudly if missing;
* ``MULTACT_BACKEND=numpy`` -- force the pure-numpy path;
* unset -- numba when importable, numpy otherwise.

``benchmarks/bench_kernels.py`` times the two implementations side by side.
"""

from __future__ import annotations

import os

_CHOICE = os.environ.get("MULTACT_BACKEND", "").strip().lower()

if _CHOICE not in ("", "numba", "numpy"):
    raise RuntimeError(
        f"MULTACT_BACKEND must be 'numba' or 'numpy', got {_CHOICE!r}"
    )

if _CHOICE == "numpy":
    _HAVE_NUMBA = False
else:
    try:
        import numba  # noqa: F401

        _HAVE_NUMBA = True
    except ImportError:
        if _CHOICE == "numba":
            raise
        _HAVE_NUMBA = False

if _HAVE_NUMBA:
    from . import _kernels_numba as _kernels

    _BACKEND = "numba"
else:
    from . import _kernels_numpy as _kernels

    _BACKEND = "numpy"


def backend_name() -> str:
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return _BACKEND


def kernels():
    """The active kernel module."""
    return _kernels


def load_kernels(name: str):
    """Load a kernel module by name, independent of the active backend."""
    if name == "numba":
        from . import _kernels_numba

        return _kernels_numba
    if name == "numpy":
        from . import _kernels_numpy

        return _kernels_numpy
    raise ValueError(f"unknown backend {name!r}")
