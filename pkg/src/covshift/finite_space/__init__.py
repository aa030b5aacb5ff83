"""Finite-probability-space engine: posteriors given partitions, shift
predicates, sufficiency, and brute-force checks of the inheritance results."""
from .core import (
    UNDEFINED,
    CellFunction,
    DriftFunction,
    Event,
    FiniteMeasure,
    FiniteSpace,
    Partition,
    Reweighting,
)
from .generators import (
    random_event,
    random_he_instance,
    random_measure,
    random_partition,
    random_sufficient_measure,
)
from .shift import (
    DEFAULT_TOL,
    conditional_measure,
    conditional_prob,
    is_absolutely_continuous,
    is_covariate_shift,
    is_prior_probability_shift,
    is_sufficient,
    is_sufficient_factorization,
    posterior_gap,
    reweight,
    sufficiency_gap,
)
from .textio import SpaceDocument, dumps_space, dumps_verdict, loads_space, loads_verdict
from .verify import (
    Example3,
    SweepRow,
    TheoremVerdict,
    drift_holds,
    drift_measure,
    enumerate_coarsenings,
    enumerate_partitions,
    example3_space,
    he_implication_check,
    sweep_theorem1,
    verify_proposition1,
    verify_theorem1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
