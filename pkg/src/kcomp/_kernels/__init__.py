"""Backend selection for the hot loops.

``KCOMP_BACKEND=numpy`` forces the pure-numpy path; the default is numba
when it imports, numpy otherwise. Both backends return identical integers;
floating-point sums agree to rounding.
"""

from __future__ import annotations

import os
from types import ModuleType

from kcomp._kernels import numpy_kernels

ALL, SPLIT, TWISE = numpy_kernels.ALL, numpy_kernels.SPLIT, numpy_kernels.TWISE

BACKENDS = ("numba", "numpy")


def _load_numba() -> ModuleType | None:
    try:
        from kcomp._kernels import numba_kernels
    except ImportError:
        return None
    return numba_kernels


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module for ``name`` (``numba``/``numpy``), or the configured default."""
    if name is None:
        name = os.environ.get("KCOMP_BACKEND", "numba").strip().lower() or "numba"
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {BACKENDS}")
    if name == "numba":
        mod = _load_numba()
        if mod is not None:
            return mod
    return numpy_kernels


def backend_name(mod: ModuleType | None = None) -> str:
    mod = mod or get_backend()
    return "numpy" if mod is numpy_kernels else "numba"


KIND_CODES = {"all": ALL, "split": SPLIT, "twise": TWISE}
