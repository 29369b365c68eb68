"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``MIXSIG_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
enumerate_ball = _pykernels.enumerate_ball
cell_bounds = _pykernels.cell_bounds

if os.environ.get("MIXSIG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        enumerate_ball = _ckernels.enumerate_ball
        cell_bounds = _ckernels.cell_bounds


def backends() -> dict:
    """All importable implementations keyed by name (used by tests and benchmarks)."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
