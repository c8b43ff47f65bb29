"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``BALLASTPLAN_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and the parity tests).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("BALLASTPLAN_PURE_PYTHON"):
    from . import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl

        COMPILED = False


def chain_argmin(quad, lin, impl=None) -> np.ndarray:
    """Minimise a separable quadratic over the alternating fill/vent chain."""
    quad = np.ascontiguousarray(quad, dtype=np.float64)
    lin = np.ascontiguousarray(lin, dtype=np.float64)
    out = np.empty(quad.shape[0], dtype=np.float64)
    (impl or _impl).chain_argmin(quad, lin, out)
    return out


def grid_search(cost, c_units: int, impl=None):
    """Exhaustive minimum over grid-valued buoyancy changes.

    Returns (best_cost, delta_indices).
    """
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    out_idx = np.zeros(cost.shape[0], dtype=np.int64)
    best = (impl or _impl).grid_search(cost, int(c_units), out_idx)
    return best, out_idx
