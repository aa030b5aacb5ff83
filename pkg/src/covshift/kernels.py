"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy versions
are used. Set ``COVSHIFT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("COVSHIFT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

cell_totals = _impl.cell_totals
posterior_gaps = _impl.posterior_gaps
best_split_indices = _impl.best_split_indices
step_sum = _impl.step_sum
upper_counts = _impl.upper_counts

__all__ = [
    "BACKEND",
    "cell_totals",
    "posterior_gaps",
    "best_split_indices",
    "step_sum",
    "upper_counts",
]
