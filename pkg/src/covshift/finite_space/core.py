"""Finite sample spaces, measures, events and partitions.

On a finite space every sub-sigma-algebra is generated by a unique partition,
so partitions stand in for information sets throughout the package.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from ..errors import PreconditionError, StructuralError

MASS_TOL = 1e-12


class _Undefined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNDEFINED"

    def __bool__(self):
        return False


#: Marker for conditional probabilities on cells of measure zero.
UNDEFINED = _Undefined()


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FiniteSpace:
    outcomes: tuple
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        outcomes = tuple(self.outcomes)
        if len(outcomes) < 2:
            raise StructuralError("a finite space needs at least two outcomes")
        index = {o: i for i, o in enumerate(outcomes)}
        if len(index) != len(outcomes):
            raise StructuralError("outcome identifiers must be distinct")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "_index", index)

    @classmethod
    def of_size(cls, n: int) -> "FiniteSpace":
        return cls(tuple(range(n)))

    def __len__(self):
        return len(self.outcomes)

    def index_of(self, outcome: Hashable) -> int:
        try:
            return self._index[outcome]
        except KeyError:
            raise StructuralError(f"{outcome!r} is not an outcome of this space") from None

    def event(self, members: Iterable[Hashable]) -> "Event":
        mask = np.zeros(len(self), dtype=bool)
        for m in members:
            mask[self.index_of(m)] = True
        return Event(self, mask)

    def full(self) -> "Event":
        return Event(self, np.ones(len(self), dtype=bool))

    def singletons(self) -> "Partition":
        return Partition(self, np.arange(len(self)))

    def trivial(self) -> "Partition":
        return Partition(self, np.zeros(len(self), dtype=np.intp))


def check_same_space(*objs) -> FiniteSpace:
    space = objs[0].space
    for o in objs[1:]:
        if o.space is not space and o.space != space:
            raise StructuralError("objects live on different finite spaces")
    return space


@dataclass(frozen=True, eq=False)
class Event:
    space: FiniteSpace
    mask: np.ndarray

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.shape != (len(self.space),):
            raise StructuralError("event mask does not match the space")
        object.__setattr__(self, "mask", _readonly(mask))

    @property
    def members(self) -> frozenset:
        return frozenset(o for o, m in zip(self.space.outcomes, self.mask) if m)

    def complement(self) -> "Event":
        return Event(self.space, ~self.mask)

    def __eq__(self, other):
        return (isinstance(other, Event) and other.space == self.space
                and bool(np.array_equal(other.mask, self.mask)))

    def __hash__(self):
        return hash((self.space, self.mask.tobytes()))

    def __repr__(self):
        return f"Event({sorted(self.members, key=self.space.index_of)!r})"


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    space: FiniteSpace
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=np.float64)
        if mass.shape != (len(self.space),):
            raise StructuralError("mass vector does not match the space")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise StructuralError("masses must be finite and non-negative")
        if abs(math.fsum(mass) - 1.0) > MASS_TOL:
            raise StructuralError(f"masses sum to {math.fsum(mass)!r}, not 1")
        object.__setattr__(self, "mass", _readonly(mass))

    @classmethod
    def uniform(cls, space: FiniteSpace) -> "FiniteMeasure":
        return cls(space, np.full(len(space), 1.0 / len(space)))

    @classmethod
    def from_weights(cls, space: FiniteSpace, weights: Sequence[float]) -> "FiniteMeasure":
        w = np.asarray(weights, dtype=np.float64)
        total = math.fsum(w)
        if total <= 0:
            raise StructuralError("weights must have positive total")
        return cls(space, w / total)

    def prob(self, event: Event) -> float:
        check_same_space(self, event)
        return float(self.mass[event.mask].sum())

    def allclose(self, other: "FiniteMeasure", atol: float = 1e-12) -> bool:
        check_same_space(self, other)
        return bool(np.allclose(self.mass, other.mass, rtol=0.0, atol=atol))

    def __repr__(self):
        return f"FiniteMeasure({list(self.mass)!r})"


def _canonical_labels(labels: np.ndarray) -> np.ndarray:
    # renumber cells in order of first appearance
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inverse].astype(np.intp)


@dataclass(frozen=True, eq=False)
class Partition:
    """A partition of the outcomes, stored as one cell label per outcome."""

    space: FiniteSpace
    labels: np.ndarray
    ncells: int = field(init=False)

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != (len(self.space),):
            raise StructuralError("partition labels do not match the space")
        labels = _canonical_labels(labels)
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "ncells", int(labels.max()) + 1)

    @classmethod
    def from_cells(cls, space: FiniteSpace, cells: Iterable[Iterable[Hashable]]) -> "Partition":
        labels = np.full(len(space), -1, dtype=np.intp)
        for k, cell in enumerate(cells):
            members = list(cell)
            if not members:
                raise StructuralError("partition cells must be nonempty")
            for o in members:
                i = space.index_of(o)
                if labels[i] != -1:
                    raise StructuralError(f"outcome {o!r} appears in two cells")
                labels[i] = k
        if np.any(labels < 0):
            missing = [space.outcomes[i] for i in np.flatnonzero(labels < 0)]
            raise StructuralError(f"cells do not cover outcomes {missing!r}")
        return cls(space, labels)

    @classmethod
    def from_function(cls, space: FiniteSpace, fn: Callable[[Any], Hashable]) -> "Partition":
        """Partition by the level sets of ``fn`` (the sigma-algebra it generates)."""
        keys: dict = {}
        labels = [keys.setdefault(fn(o), len(keys)) for o in space.outcomes]
        return cls(space, np.asarray(labels))

    @property
    def cells(self) -> tuple:
        out = [[] for _ in range(self.ncells)]
        for o, c in zip(self.space.outcomes, self.labels):
            out[c].append(o)
        return tuple(frozenset(c) for c in out)

    def cell_event(self, k: int) -> Event:
        return Event(self.space, self.labels == k)

    def cell_of(self, outcome: Hashable) -> int:
        return int(self.labels[self.space.index_of(outcome)])

    def join(self, other: "Partition | Event") -> "Partition":
        """Common refinement; an Event joins as the partition {A, A^c}."""
        check_same_space(self, other)
        other_labels = other.mask.astype(np.intp) if isinstance(other, Event) else other.labels
        return Partition(self.space, self.labels * (other_labels.max() + 1) + other_labels)

    def coarsens(self, finer: "Partition") -> bool:
        """True if every cell of ``finer`` lies inside one cell of ``self``."""
        check_same_space(self, finer)
        parent = np.full(finer.ncells, -1, dtype=np.intp)
        for f, c in zip(finer.labels, self.labels):
            if parent[f] == -1:
                parent[f] = c
            elif parent[f] != c:
                return False
        return True

    def parent_map(self, finer: "Partition") -> np.ndarray:
        """For each cell of ``finer``, the index of the enclosing cell of ``self``."""
        if not self.coarsens(finer):
            raise StructuralError("partition is not a coarsening of the given partition")
        parent = np.empty(finer.ncells, dtype=np.intp)
        parent[finer.labels] = self.labels
        return parent

    def measures(self, event: Event) -> bool:
        """True if the event is a union of cells."""
        check_same_space(self, event)
        inside = np.zeros(self.ncells, dtype=bool)
        outside = np.zeros(self.ncells, dtype=bool)
        inside[self.labels[event.mask]] = True
        outside[self.labels[~event.mask]] = True
        return not bool(np.any(inside & outside))

    def __eq__(self, other):
        return (isinstance(other, Partition) and other.space == self.space
                and bool(np.array_equal(other.labels, self.labels)))

    def __hash__(self):
        return hash((self.space, self.labels.tobytes()))

    def __repr__(self):
        cells = [sorted(c, key=self.space.index_of) for c in self.cells]
        return f"Partition({cells!r})"


@dataclass(frozen=True, eq=False)
class CellFunction:
    """One value per partition cell; ``UNDEFINED`` on null cells."""

    partition: Partition
    values: tuple

    def __post_init__(self):
        values = tuple(self.values)
        if len(values) != self.partition.ncells:
            raise StructuralError("one value per cell is required")
        for v in values:
            if v is not UNDEFINED and not (0.0 <= v <= 1.0):
                raise StructuralError(f"cell value {v!r} outside [0, 1]")
        object.__setattr__(self, "values", values)

    def as_array(self) -> np.ndarray:
        """Values as floats with NaN in place of ``UNDEFINED``."""
        return np.array([np.nan if v is UNDEFINED else v for v in self.values])

    def at(self, outcome: Hashable):
        return self.values[self.partition.cell_of(outcome)]

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Reweighting:
    """A density, constant on the cells of ``partition``, relative to ``base``."""

    base: FiniteMeasure
    partition: Partition
    density: np.ndarray

    def __post_init__(self):
        check_same_space(self.base, self.partition)
        d = np.array(self.density, dtype=np.float64)
        if d.shape != (self.partition.ncells,):
            raise StructuralError("one density value per cell is required")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise StructuralError("density values must be finite and non-negative")
        expectation = math.fsum(d[self.partition.labels] * self.base.mass)
        if abs(expectation - 1.0) > MASS_TOL:
            raise PreconditionError(f"density has expectation {expectation!r} under the base measure, not 1")
        object.__setattr__(self, "density", _readonly(d))

    @classmethod
    def normalized(cls, base: FiniteMeasure, partition: Partition,
                   weights: Sequence[float]) -> "Reweighting":
        w = np.asarray(weights, dtype=np.float64)
        expectation = math.fsum(w[partition.labels] * base.mass)
        if expectation <= 0:
            raise PreconditionError("weights vanish on the support of the base measure")
        return cls(base, partition, w / expectation)

    @classmethod
    def random(cls, base: FiniteMeasure, partition: Partition,
               rng: np.random.Generator) -> "Reweighting":
        # log-uniform on [e^-2, e^2] keeps densities away from 0
        w = np.exp(rng.uniform(-2.0, 2.0, size=partition.ncells))
        return cls.normalized(base, partition, w)

    def at_outcomes(self) -> np.ndarray:
        return self.density[self.partition.labels]


class DriftFunction:
    """Increasing map of [0, 1] into [0, 1] relating source and target posteriors."""

    GRID = np.linspace(0.0, 1.0, 101)

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], name: str = "drift"):
        self.fn = fn
        self.name = name
        values = np.asarray(fn(self.GRID), dtype=np.float64)
        if np.any(np.diff(values) < 0):
            raise StructuralError(f"drift function {name!r} is not increasing")
        if np.any(values < 0) or np.any(values > 1):
            raise StructuralError(f"drift function {name!r} leaves [0, 1]")

    def __call__(self, x):
        return self.fn(x)

    def __repr__(self):
        return f"DriftFunction({self.name})"

    @classmethod
    def identity(cls) -> "DriftFunction":
        return cls(lambda x: np.asarray(x, dtype=np.float64), "identity")

    @classmethod
    def square(cls) -> "DriftFunction":
        return cls(lambda x: np.asarray(x, dtype=np.float64) ** 2, "square")

    @classmethod
    def clipped_affine(cls, slope: float, intercept: float) -> "DriftFunction":
        if slope < 0:
            raise StructuralError("slope must be non-negative")
        return cls(lambda x: np.clip(slope * np.asarray(x, dtype=np.float64) + intercept, 0.0, 1.0),
                   f"clip({slope:g}x{intercept:+g})")
