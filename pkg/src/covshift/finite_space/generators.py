"""Random finite instances used by the property suites and the theorem sweep."""
from __future__ import annotations

import numpy as np

from ..errors import PreconditionError
from .core import Event, FiniteMeasure, FiniteSpace, Partition


def random_measure(space: FiniteSpace, rng: np.random.Generator,
                   zero_prob: float = 0.0) -> FiniteMeasure:
    """Dirichlet(1) masses; each outcome is zeroed with probability ``zero_prob``."""
    n = len(space)
    w = rng.dirichlet(np.ones(n))
    if zero_prob > 0:
        keep = rng.random(n) >= zero_prob
        if not keep.any():
            keep[rng.integers(n)] = True
        w = np.where(keep, w, 0.0)
    return FiniteMeasure.from_weights(space, w)


def random_event(space: FiniteSpace, rng: np.random.Generator,
                 avoid: Partition | None = None) -> Event:
    """A nonempty proper subset, not measurable w.r.t. ``avoid`` when that is possible."""
    n = len(space)
    must_avoid = avoid is not None and avoid.ncells < n
    while True:
        mask = rng.random(n) < 0.5
        if not mask.any() or mask.all():
            continue
        event = Event(space, mask)
        if must_avoid and avoid.measures(event):
            continue
        return event


def random_partition(space: FiniteSpace, rng: np.random.Generator,
                     max_cells: int | None = None) -> Partition:
    n = len(space)
    k = int(rng.integers(1, (max_cells or n) + 1))
    labels = rng.integers(0, k, size=n)
    return Partition(space, labels)


def random_sufficient_measure(A: Event, G: Partition, H: Partition, rng: np.random.Generator,
                              attempts: int = 100) -> FiniteMeasure:
    """A measure under which ``G`` is sufficient for ``H`` with respect to ``A``.

    Every G-cell gets one posterior value; each H-cell inside it either carries
    that posterior exactly or is left null when it cannot (e.g. a cell inside
    ``A`` when the value is below 1).
    """
    parent = G.parent_map(H)
    a_mask = A.mask
    has_a = np.bincount(H.labels, weights=a_mask, minlength=H.ncells) > 0
    has_b = np.bincount(H.labels, weights=~a_mask, minlength=H.ncells) > 0
    for _ in range(attempts):
        cell_post = np.empty(H.ncells)
        for d in range(G.ncells):
            inner = parent == d
            mixed = inner & has_a & has_b
            choices = []
            if mixed.any() and rng.random() < 0.7:
                r = rng.uniform(0.05, 0.95)
            else:
                if (inner & has_a).any():
                    choices.append(1.0)
                if (inner & has_b).any():
                    choices.append(0.0)
                r = choices[rng.integers(len(choices))]
            cell_post[inner] = r
        cell_mass = rng.uniform(0.2, 1.0, size=H.ncells)
        feasible = ((cell_post == 0) | has_a) & ((cell_post == 1) | has_b)
        cell_mass[~feasible] = 0.0
        mass = np.zeros(len(A.space))
        for c in range(H.ncells):
            if cell_mass[c] == 0:
                continue
            in_c = H.labels == c
            for part, share in ((in_c & a_mask, cell_post[c]), (in_c & ~a_mask, 1 - cell_post[c])):
                if share > 0:
                    mass[part] = cell_mass[c] * share * rng.dirichlet(np.ones(part.sum()))
        total = mass.sum()
        pa = mass[a_mask].sum() / total if total > 0 else 0.0
        if 0.0 < pa < 1.0:
            return FiniteMeasure.from_weights(A.space, mass)
    raise PreconditionError("could not build a sufficient measure with 0 < P[A] < 1")


def random_he_instance(space: FiniteSpace, rng: np.random.Generator):
    """(P, Q, A, T, H) satisfying the domain-invariance premises by construction.

    T coarsens H and is sufficient under P; Q moves mass between the H-cells of
    each T-cell while keeping every H-cell's posterior and every
    (class, T-cell) mass unchanged.
    """
    n = len(space)
    while True:
        H = random_partition(space, rng)
        T = Partition(space, rng.integers(0, max(1, H.ncells // 2) + 1, size=H.ncells)[H.labels])
        # H-cells must meet both classes so every posterior value is reachable
        A = random_event(space, rng)
        has_a = np.bincount(H.labels, weights=A.mask, minlength=H.ncells) > 0
        has_b = np.bincount(H.labels, weights=~A.mask, minlength=H.ncells) > 0
        if (has_a & has_b).all():
            break
    parent = T.parent_map(H)
    t_post = rng.uniform(0.05, 0.95, size=T.ncells)
    p_cell = rng.uniform(0.2, 1.0, size=H.ncells)
    q_cell = p_cell.copy()
    for d in range(T.ncells):
        inner = np.flatnonzero(parent == d)
        q_cell[inner] = p_cell[inner].sum() * rng.dirichlet(np.ones(inner.size))
    # a common within-class split keeps the two measures' supports equal
    p_mass = np.zeros(n)
    q_mass = np.zeros(n)
    for c in range(H.ncells):
        in_c = H.labels == c
        r = t_post[parent[c]]
        for part, share in ((in_c & A.mask, r), (in_c & ~A.mask, 1 - r)):
            split = rng.dirichlet(np.ones(part.sum()))
            p_mass[part] = p_cell[c] * share * split
            q_mass[part] = q_cell[c] * share * split
    total = p_mass.sum()
    return (FiniteMeasure(space, p_mass / total), FiniteMeasure(space, q_mass / total), A, T, H)
