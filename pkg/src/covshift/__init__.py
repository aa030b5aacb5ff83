"""Covariate shift under information reduction, and class prior estimation.

Subpackages and modules:

finite_space
    Finite probability spaces with partitions as information sets; shift
    predicates, sufficiency, and brute-force checks of the inheritance results.
binormal
    The equal-variance binormal model and the data for the two figures.
estimators
    Probability average, classify & count, adjusted count, mean matching and
    the single-split estimator.
probing
    Prior estimation from an ensemble of cost-sensitive classifiers.
"""
__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
