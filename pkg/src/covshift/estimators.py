"""Sample-based class prior estimators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .binormal import BinormalParams, split_posteriors
from .errors import UninformativeClassifierError
from .samples import LabeledSample, UnlabeledSample, read_sample, write_sample

__all__ = [
    "EstimatorReport",
    "LabeledSample",
    "ThresholdClassifier",
    "UnlabeledSample",
    "acc_estimate",
    "acc_from_rates",
    "cc_estimate",
    "discretized_estimate",
    "mean_matching_estimate",
    "pa_estimate",
    "read_sample",
    "write_sample",
]


@dataclass(frozen=True)
class ThresholdClassifier:
    """Predicts positive when ``score(x) > threshold``.

    ``score`` defaults to the covariate itself. The thresholds -inf and +inf
    give the all-positive and all-negative classifiers.
    """

    threshold: float
    score: Callable | None = None

    def __post_init__(self):
        if math.isnan(self.threshold):
            raise ValueError("threshold must not be NaN")

    def scores(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x if self.score is None else np.asarray(self.score(x), dtype=np.float64)

    def predict(self, x) -> np.ndarray:
        return self.scores(x) > self.threshold

    __call__ = predict


@dataclass(frozen=True)
class EstimatorReport:
    estimate: float
    method: str
    n_target: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def clipped(self) -> bool:
        return bool(self.diagnostics.get("clipped", False))

    @property
    def raw(self) -> float:
        return float(self.diagnostics.get("raw", self.estimate))

    CSV_HEADER = "method,estimate,n_target,clipped,raw"

    def csv_row(self) -> str:
        return (f"{self.method},{self.estimate:.10g},{self.n_target},"
                f"{str(self.clipped).lower()},{self.raw:.10g}")


def _clipped(raw: float, method: str, n: int, **diag) -> EstimatorReport:
    est = min(max(raw, 0.0), 1.0)
    return EstimatorReport(est, method, n, {"raw": raw, "clipped": est != raw, **diag})


def pa_estimate(posterior_fn: Callable, target: UnlabeledSample) -> EstimatorReport:
    """Probability average: mean source posterior over the target covariates."""
    values = np.asarray(posterior_fn(target.x), dtype=np.float64)
    return _clipped(float(np.mean(values)), "pa", len(target))


def cc_estimate(clf: ThresholdClassifier, target: UnlabeledSample) -> EstimatorReport:
    """Classify and count: fraction of the target predicted positive."""
    return _clipped(float(np.mean(clf.predict(target.x))), "cc", len(target))


def acc_from_rates(cc: float, tpr: float, fpr: float) -> float:
    """Unclipped adjusted count (cc - fpr) / (tpr - fpr)."""
    if abs(tpr - fpr) < 1e-6:
        raise UninformativeClassifierError(f"tpr ({tpr:g}) and fpr ({fpr:g}) coincide")
    return (cc - fpr) / (tpr - fpr)


def acc_estimate(clf: ThresholdClassifier, source: LabeledSample,
                 target: UnlabeledSample) -> EstimatorReport:
    """Adjusted classify and count with rates from the full labeled source."""
    pred = clf.predict(source.x)
    pos = source.y == 1
    if pos.all() or not pos.any():
        raise UninformativeClassifierError("source sample needs both classes")
    tpr = float(np.mean(pred[pos]))
    fpr = float(np.mean(pred[~pos]))
    cc = float(np.mean(clf.predict(target.x)))
    raw = acc_from_rates(cc, tpr, fpr)
    return _clipped(raw, "acc", len(target), tpr=tpr, fpr=fpr, cc=cc)


def mean_matching_estimate(params: BinormalParams, target: UnlabeledSample) -> EstimatorReport:
    """Mixture weight matching the target mean: (mean - mu) / (nu - mu)."""
    if params.nu == params.mu:
        raise UninformativeClassifierError("class means coincide")
    raw = (float(np.mean(target.x)) - params.mu) / (params.nu - params.mu)
    return _clipped(raw, "mean_matching", len(target))


def discretized_estimate(params: BinormalParams, x_threshold: float,
                         target: UnlabeledSample) -> EstimatorReport:
    """Single-split estimate with the empirical target share below the threshold
    and the exact source posteriors on each side."""
    _, post_below, post_above = split_posteriors(params, x_threshold)
    share = float(np.mean(target.x <= x_threshold))
    raw = share * post_below + (1.0 - share) * post_above
    return _clipped(raw, "discretized", len(target), threshold=x_threshold, share_below=share)
