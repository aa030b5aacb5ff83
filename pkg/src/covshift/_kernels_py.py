"""Pure numpy implementations of the hot kernels.

Signatures and results match the compiled ``_kernels`` extension exactly; the
selector in :mod:`covshift.kernels` picks one at import time.
"""
from __future__ import annotations

import numpy as np


def cell_totals(mass, in_a, labels, ncells):
    """Per-row cell masses and per-row masses of ``A`` inside each cell.

    ``mass`` is ``(rows, n)``; returns two ``(rows, ncells)`` arrays.
    """
    mass = np.ascontiguousarray(mass, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    in_a = np.asarray(in_a, dtype=bool)
    rows, n = mass.shape
    tot = np.zeros((rows, ncells))
    a_tot = np.zeros((rows, ncells))
    # sequential accumulation keeps the summation order identical to the C loop
    for j in range(n):
        c = labels[j]
        tot[:, c] += mass[:, j]
        if in_a[j]:
            a_tot[:, c] += mass[:, j]
    return tot, a_tot


def posterior_gaps(qmass, in_a, labels, ncells, ref_post):
    """Largest |Q[A|C] - ref[C]| over Q-positive cells, one value per row.

    ``ref_post`` holds NaN on cells where the reference posterior is undefined;
    a Q-positive cell there yields ``inf``.
    """
    tot, a_tot = cell_totals(qmass, in_a, labels, ncells)
    ref = np.asarray(ref_post, dtype=np.float64)
    gaps = np.zeros(tot.shape[0])
    for c in range(ncells):
        pos = tot[:, c] > 0.0
        if not pos.any():
            continue
        if np.isnan(ref[c]):
            gaps[pos] = np.inf
            continue
        g = np.zeros(tot.shape[0])
        g[pos] = np.abs(a_tot[pos, c] / tot[pos, c] - ref[c])
        gaps = np.maximum(gaps, g)
    return gaps


def best_split_indices(cum_pos, cum_neg, costs):
    """Index k minimising ``(1-t)*cum_pos[k] + t*(cum_neg[-1] - cum_neg[k])``.

    Ties resolve to the largest k (the smallest positive region).
    """
    cum_pos = np.asarray(cum_pos, dtype=np.float64)
    cum_neg = np.asarray(cum_neg, dtype=np.float64)
    tail_neg = cum_neg[-1] - cum_neg
    last = cum_pos.shape[0] - 1
    out = np.empty(len(costs), dtype=np.intp)
    for i, t in enumerate(np.asarray(costs, dtype=np.float64)):
        loss = (1.0 - t) * cum_pos + t * tail_neg
        out[i] = last - int(np.argmin(loss[::-1]))
    return out


def step_sum(sorted_thr, cum_w, x):
    """``cum_w[#{thr < x}]`` for every x; thresholds must be sorted."""
    idx = np.searchsorted(np.asarray(sorted_thr, dtype=np.float64),
                          np.asarray(x, dtype=np.float64), side="left")
    return np.asarray(cum_w, dtype=np.float64)[idx]


def upper_counts(sorted_x, thresholds):
    """Number of sample points strictly above each threshold."""
    sorted_x = np.asarray(sorted_x, dtype=np.float64)
    idx = np.searchsorted(sorted_x, np.asarray(thresholds, dtype=np.float64), side="right")
    return (sorted_x.shape[0] - idx).astype(np.int64)
