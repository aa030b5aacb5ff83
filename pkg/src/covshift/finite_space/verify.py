"""Brute-force checks of the inheritance results on finite spaces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .. import kernels
from ..errors import PreconditionError, StructuralError
from .core import (
    DriftFunction,
    Event,
    FiniteMeasure,
    FiniteSpace,
    Partition,
    Reweighting,
    check_same_space,
)
from .generators import random_event, random_measure, random_sufficient_measure
from .shift import (
    DEFAULT_TOL,
    _posterior_array,
    is_covariate_shift,
    sufficiency_gap,
)


@dataclass(frozen=True)
class TheoremVerdict:
    sufficient: bool
    inherited: bool
    witness: FiniteMeasure | None = None
    a_measurable: bool = False
    n_probes: int = 0

    @property
    def agree(self) -> bool:
        return self.sufficient == self.inherited


def _probe_matrix(P: FiniteMeasure, H: Partition, n_random: int,
                  rng: np.random.Generator) -> np.ndarray:
    rows = []
    cell_mass = np.bincount(H.labels, weights=P.mass, minlength=H.ncells)
    for c in np.flatnonzero(cell_mass > 0):
        rows.append(np.where(H.labels == c, P.mass, 0.0) / cell_mass[c])
    for _ in range(n_random):
        h = Reweighting.random(P, H, rng)
        q = h.at_outcomes() * P.mass
        rows.append(q / q.sum())
    return np.array(rows)


def verify_theorem1(P: FiniteMeasure, A: Event, G: Partition, H: Partition,
                    n_random: int = 8, seed=None, tol: float = DEFAULT_TOL) -> TheoremVerdict:
    """Compare sufficiency of ``G`` with inheritance of covariate shift from ``H``.

    Inheritance is probed with the conditional measures P(. | C) for every
    P-positive H-cell C, followed by ``n_random`` random H-measurable
    reweightings of P. The conditional measures alone refute inheritance
    whenever sufficiency fails.
    """
    check_same_space(P, A, G, H)
    G.parent_map(H)
    pa = P.prob(A)
    if not 0.0 < pa < 1.0:
        raise PreconditionError(f"P[A] must lie strictly between 0 and 1, got {pa!r}")
    rng = np.random.default_rng(seed)

    sufficient = sufficiency_gap(P, A, G, H) <= tol
    probes = _probe_matrix(P, H, n_random, rng)
    ref_h = _posterior_array(P.mass, A, H)
    in_class = kernels.posterior_gaps(probes, A.mask, H.labels, H.ncells, ref_h) <= tol
    probes = probes[in_class]
    ref_g = _posterior_array(P.mass, A, G)
    gaps = kernels.posterior_gaps(probes, A.mask, G.labels, G.ncells, ref_g)
    bad = np.flatnonzero(gaps > tol)
    witness = FiniteMeasure(P.space, probes[bad[0]]) if bad.size else None
    return TheoremVerdict(
        sufficient=bool(sufficient),
        inherited=not bad.size,
        witness=witness,
        a_measurable=H.measures(A),
        n_probes=int(probes.shape[0]),
    )


def drift_measure(P: FiniteMeasure, A: Event, H: Partition, f: DriftFunction,
                  h: Reweighting) -> FiniteMeasure:
    """Target with H-cell masses from ``h`` and posteriors ``f(P[A|C])`` per H-cell.

    Inside a cell, mass is spread proportionally to P on each class part, or
    uniformly when P gives that part no mass.
    """
    check_same_space(P, A, H)
    if not h.partition.coarsens(H):
        raise StructuralError("density must be constant on the cells of H")
    cell_p = np.bincount(H.labels, weights=P.mass, minlength=H.ncells)
    density = h.density[h.partition.parent_map(H)]
    post = _posterior_array(P.mass, A, H)
    q = np.zeros(len(P.space))
    for c in range(H.ncells):
        if cell_p[c] == 0:
            continue
        target_post = float(f(post[c]))
        in_c = H.labels == c
        for part, share in ((in_c & A.mask, target_post), (in_c & ~A.mask, 1.0 - target_post)):
            if share <= 0:
                continue
            if not part.any():
                raise PreconditionError(
                    f"drift asks for posterior {target_post:g} on a cell that lies within one class")
            weights = P.mass[part]
            weights = weights / weights.sum() if weights.sum() > 0 else np.full(part.sum(), 1.0 / part.sum())
            q[part] = density[c] * cell_p[c] * share * weights
    return FiniteMeasure(P.space, q / q.sum())


def verify_proposition1(P: FiniteMeasure, A: Event, G: Partition, H: Partition,
                        f: DriftFunction, h: Reweighting, tol: float = DEFAULT_TOL,
                        check_tol: float = 1e-9) -> bool:
    """Whether the drift relation carries over from ``H`` to a sufficient ``G``."""
    check_same_space(P, A, G, H)
    if sufficiency_gap(P, A, G, H) > tol:
        raise PreconditionError("G is not sufficient for H under P")
    Q = drift_measure(P, A, H, f, h)
    return drift_holds(P, Q, A, G, f, check_tol)


def drift_holds(P: FiniteMeasure, Q: FiniteMeasure, A: Event, G: Partition,
                f: DriftFunction, tol: float = 1e-9) -> bool:
    """Q[A|D] == f(P[A|D]) on every Q-positive cell D of ``G``."""
    post_p = _posterior_array(P.mass, A, G)
    post_q = _posterior_array(Q.mass, A, G)
    charged = ~np.isnan(post_q)
    if np.any(np.isnan(post_p[charged])):
        return False
    return bool(np.all(np.abs(post_q[charged] - f(post_p[charged])) <= tol))


def he_implication_check(P: FiniteMeasure, Q: FiniteMeasure, A: Event, T: Partition,
                         H: Partition, tol: float = DEFAULT_TOL) -> bool:
    """Covariate shift on ``H`` from the two domain-invariance premises on ``T``."""
    check_same_space(P, Q, A, T, H)
    T.parent_map(H)
    if sufficiency_gap(P, A, T, H) > tol:
        raise PreconditionError("premise violated: P[A|T] differs from P[A|H]")
    if sufficiency_gap(Q, A, T, H) > tol:
        raise PreconditionError("premise violated: Q[A|T] differs from Q[A|H]")
    for part in (A.mask, ~A.mask):
        p = np.bincount(T.labels, weights=np.where(part, P.mass, 0.0), minlength=T.ncells)
        q = np.bincount(T.labels, weights=np.where(part, Q.mass, 0.0), minlength=T.ncells)
        if np.any(np.abs(p - q) > tol):
            raise PreconditionError("premise violated: P and Q differ on a (class, T-cell) joint mass")
    return is_covariate_shift(P, Q, A, H, tol)


@dataclass(frozen=True)
class Example3:
    P: FiniteMeasure
    A: Event
    F: Partition
    G: Partition
    H: Partition


def example3_space(seed=0) -> Example3:
    """Outcomes ``"yfg"`` in {0,1}^3 with (label, f) independent of g.

    The label depends on f, so dropping f from H = F v G loses sufficiency.
    """
    rng = np.random.default_rng(seed)
    space = FiniteSpace(tuple(f"{y}{f}{g}" for y in (0, 1) for f in (0, 1) for g in (0, 1)))
    pf = rng.uniform(0.2, 0.8)
    r0 = rng.uniform(0.1, 0.4)
    r1 = rng.uniform(0.6, 0.9)
    pg = rng.uniform(0.2, 0.8)
    mass = []
    for o in space.outcomes:
        y, f, g = (int(ch) for ch in o)
        r = r1 if f else r0
        mass.append((pf if f else 1 - pf) * (r if y else 1 - r) * (pg if g else 1 - pg))
    P = FiniteMeasure.from_weights(space, mass)
    A = Event(space, [o[0] == "1" for o in space.outcomes])
    F = Partition.from_function(space, lambda o: o[1])
    G = Partition.from_function(space, lambda o: o[2])
    return Example3(P=P, A=A, F=F, G=G, H=F.join(G))


def enumerate_partitions(space: FiniteSpace) -> Iterator[Partition]:
    """All partitions of the space (restricted growth strings)."""
    n = len(space)

    def grow(prefix, top):
        if len(prefix) == n:
            yield prefix
            return
        for v in range(top + 2):
            yield from grow(prefix + [v], max(top, v))

    for labels in grow([0], 0):
        yield Partition(space, np.asarray(labels))


def enumerate_coarsenings(H: Partition) -> Iterator[Partition]:
    """All partitions G that H refines, i.e. all groupings of H's cells."""
    k = H.ncells

    def grow(prefix, top):
        if len(prefix) == k:
            yield prefix
            return
        for v in range(top + 2):
            yield from grow(prefix + [v], max(top, v))

    for grouping in grow([0], 0):
        yield Partition(H.space, np.asarray(grouping)[H.labels])


@dataclass(frozen=True)
class SweepRow:
    n: int
    sufficient: bool
    inherited: bool
    label: str

    @property
    def agree(self) -> bool:
        return self.sufficient == self.inherited


def sweep_theorem1(max_size: int = 6, n_instances: int = 20, n_random: int = 4,
                   seed: int = 0, tol: float = DEFAULT_TOL,
                   include_example3: bool = True) -> Iterator[SweepRow]:
    """Exhaustive (H, G) enumeration on spaces of size 2..max_size.

    Each structure gets ``n_instances`` random (P, A) draws: even draws use a
    Dirichlet P (some outcomes zeroed), odd draws a P built to make G
    sufficient, so both verdicts occur.
    """
    rng = np.random.default_rng(seed)
    for n in range(2, max_size + 1):
        space = FiniteSpace.of_size(n)
        for H in enumerate_partitions(space):
            h_key = "".join(map(str, H.labels))
            for G in enumerate_coarsenings(H):
                label = f"H={h_key};G={''.join(map(str, G.labels))}"
                for k in range(n_instances):
                    while True:
                        A = random_event(space, rng, avoid=H)
                        P = None
                        if k % 2 == 1:
                            try:
                                P = random_sufficient_measure(A, G, H, rng, attempts=10)
                            except PreconditionError:
                                pass  # no sufficient P with 0 < P[A] < 1 for this A
                        if P is None:
                            P = random_measure(space, rng, zero_prob=0.15)
                        if 0.0 < P.prob(A) < 1.0:
                            break
                    v = verify_theorem1(P, A, G, H, n_random=n_random,
                                        seed=int(rng.integers(2**63)), tol=tol)
                    yield SweepRow(n, v.sufficient, v.inherited, label)
    if include_example3:
        ex = example3_space(seed)
        v = verify_theorem1(ex.P, ex.A, ex.G, ex.H, n_random=n_random, seed=seed, tol=tol)
        yield SweepRow(len(ex.P.space), v.sufficient, v.inherited, "example3")


__all__ = [
    "Example3",
    "SweepRow",
    "TheoremVerdict",
    "drift_holds",
    "drift_measure",
    "enumerate_coarsenings",
    "enumerate_partitions",
    "example3_space",
    "he_implication_check",
    "sweep_theorem1",
    "verify_proposition1",
    "verify_theorem1",
]
