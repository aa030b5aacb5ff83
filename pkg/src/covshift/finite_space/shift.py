"""Conditional probabilities, shift predicates and sufficiency tests."""
from __future__ import annotations

import numpy as np

from .. import kernels
from ..errors import IndeterminateError, PreconditionError, StructuralError
from .core import (
    UNDEFINED,
    CellFunction,
    Event,
    FiniteMeasure,
    Partition,
    Reweighting,
    check_same_space,
)

DEFAULT_TOL = 1e-9


def _cell_masses(mass: np.ndarray, A: Event, H: Partition) -> tuple[np.ndarray, np.ndarray]:
    tot, a_tot = kernels.cell_totals(mass[None, :], A.mask, H.labels, H.ncells)
    return tot[0], a_tot[0]


def _posterior_array(mass: np.ndarray, A: Event, H: Partition) -> np.ndarray:
    """P[A | cell] per cell, NaN on null cells."""
    tot, a_tot = _cell_masses(mass, A, H)
    post = np.full(H.ncells, np.nan)
    pos = tot > 0
    post[pos] = np.minimum(a_tot[pos] / tot[pos], 1.0)
    return post


def conditional_prob(P: FiniteMeasure, A: Event, H: Partition) -> CellFunction:
    check_same_space(P, A, H)
    post = _posterior_array(P.mass, A, H)
    return CellFunction(H, tuple(UNDEFINED if np.isnan(v) else float(v) for v in post))


def is_absolutely_continuous(P: FiniteMeasure, Q: FiniteMeasure, H: Partition) -> bool:
    """Whether every P-null cell of ``H`` is also Q-null."""
    check_same_space(P, Q, H)
    p_tot = np.bincount(H.labels, weights=P.mass, minlength=H.ncells)
    q_tot = np.bincount(H.labels, weights=Q.mass, minlength=H.ncells)
    return not bool(np.any((p_tot == 0) & (q_tot > 0)))


def posterior_gap(P: FiniteMeasure, Q: FiniteMeasure, A: Event, H: Partition) -> float:
    """Largest |P[A|C] - Q[A|C]| over cells charged by both measures.

    Q-null cells are ignored. Raises :class:`IndeterminateError` when Q charges
    a P-null cell.
    """
    check_same_space(P, Q, A, H)
    ref = _posterior_array(P.mass, A, H)
    gap = float(kernels.posterior_gaps(Q.mass[None, :], A.mask, H.labels, H.ncells, ref)[0])
    if np.isinf(gap):
        raise IndeterminateError(
            "target charges a cell that is null under the source; "
            "the source posterior is not identified there")
    return gap


def is_covariate_shift(P: FiniteMeasure, Q: FiniteMeasure, A: Event, H: Partition,
                       tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise PreconditionError("tol must be non-negative")
    return posterior_gap(P, Q, A, H) <= tol


def _class_conditionals(mass: np.ndarray, A: Event, H: Partition, who: str) -> tuple[np.ndarray, np.ndarray]:
    tot, a_tot = _cell_masses(mass, A, H)
    pa = a_tot.sum()
    pa0 = tot.sum() - pa
    if not (pa > 0 and pa0 > 0):
        raise PreconditionError(f"{who}[A] must lie strictly between 0 and 1")
    return a_tot / pa, (tot - a_tot) / pa0


def is_prior_probability_shift(P: FiniteMeasure, Q: FiniteMeasure, A: Event, H: Partition,
                               tol: float = DEFAULT_TOL) -> bool:
    """Whether the class-conditional cell distributions agree under P and Q."""
    check_same_space(P, Q, A, H)
    p1, p0 = _class_conditionals(P.mass, A, H, "P")
    q1, q0 = _class_conditionals(Q.mass, A, H, "Q")
    return bool(np.all(np.abs(p1 - q1) <= tol) and np.all(np.abs(p0 - q0) <= tol))


def sufficiency_gap(P: FiniteMeasure, A: Event, G: Partition, H: Partition) -> float:
    """Largest |P[A|C] - P[A|D(C)]| over P-positive cells C of H (D(C) the G-cell)."""
    check_same_space(P, A, G, H)
    parent = G.parent_map(H)
    post_h = _posterior_array(P.mass, A, H)
    post_g = _posterior_array(P.mass, A, G)
    pos = ~np.isnan(post_h)
    if not pos.any():
        return 0.0
    return float(np.max(np.abs(post_h[pos] - post_g[parent[pos]])))


def is_sufficient(P: FiniteMeasure, A: Event, G: Partition, H: Partition,
                  tol: float = DEFAULT_TOL) -> bool:
    """Whether the coarser ``G`` carries the same posterior of ``A`` as ``H`` under P."""
    return sufficiency_gap(P, A, G, H) <= tol


def is_sufficient_factorization(P: FiniteMeasure, A: Event, G: Partition, H: Partition,
                                tol: float = DEFAULT_TOL) -> bool:
    """Sufficiency as "the H-posterior is a function of the G-cell".

    Checks that inside every G-cell the posteriors of the P-positive H-cells
    agree (spread at most ``tol``). Independent of :func:`is_sufficient`, which
    compares against the G-posterior directly.
    """
    check_same_space(P, A, G, H)
    parent = G.parent_map(H)
    post_h = _posterior_array(P.mass, A, H)
    for d in range(G.ncells):
        vals = post_h[(parent == d) & ~np.isnan(post_h)]
        if vals.size and vals.max() - vals.min() > tol:
            return False
    return True


def reweight(P: FiniteMeasure, h: Reweighting) -> FiniteMeasure:
    """The measure with density ``h`` with respect to ``P``."""
    if h.base is not P and not h.base.allclose(P, atol=0.0):
        raise StructuralError("density was normalised against a different base measure")
    q = h.at_outcomes() * P.mass
    # guards the 1e-12 invariant against accumulated rounding in the product
    return FiniteMeasure(P.space, q / q.sum())


def conditional_measure(P: FiniteMeasure, C: Event) -> FiniteMeasure:
    """P conditioned on the event ``C``."""
    check_same_space(P, C)
    pc = P.prob(C)
    if pc <= 0:
        raise PreconditionError("cannot condition on an event of probability zero")
    return FiniteMeasure(P.space, np.where(C.mask, P.mass, 0.0) / pc)
