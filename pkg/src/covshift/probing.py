"""Class prior estimation by probing.

An ensemble of near-optimal cost-sensitive classifiers H(t_1), ..., H(t_n) is
aggregated into the score Z = sum (t_i - t_{i-1}) 1[H(t_i)]; members are
replaced by the level sets {Z > t_j} while that strictly lowers their loss,
and the target prior is estimated as sum (t_i - t_{i-1}) Q[H(t_i)].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .binormal import BinormalParams, coefficients, norm_cdf
from .estimators import ThresholdClassifier
from .samples import LabeledSample, UnlabeledSample

IMPROVEMENT_EPS = 1e-12
# Z and the costs are both sums of grid spacings; closer than this counts as equal
TIE_TOL = 1e-12
DEFAULT_MAX_ITER = 100
FAMILIES = ("bayes", "empirical-threshold", "corrupted")


@dataclass(frozen=True, eq=False)
class CostGrid:
    """Costs 0 = t_0 < t_1 < ... < t_n < 1."""

    t: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64)
        if t.ndim != 1 or t.size < 2:
            raise ValueError("a cost grid needs t_0 and at least one further point")
        if t[0] != 0.0:
            raise ValueError("the grid must start at 0")
        if not np.all(np.diff(t) > 0):
            raise ValueError("the grid must be strictly increasing")
        if not t[-1] < 1.0:
            raise ValueError("the last grid point must be below 1")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @classmethod
    def uniform(cls, n: int = 1000, t_max: float = 0.999) -> "CostGrid":
        return cls(t_max * np.arange(n + 1) / n)

    @property
    def n(self) -> int:
        return self.t.size - 1

    @property
    def costs(self) -> np.ndarray:
        """t_1, ..., t_n."""
        return self.t[1:]

    @property
    def weights(self) -> np.ndarray:
        """t_i - t_{i-1} for i = 1..n."""
        return np.diff(self.t)

    @property
    def max_spacing(self) -> float:
        return float(self.weights.max())


def _is_plain_threshold(clf) -> bool:
    return isinstance(clf, ThresholdClassifier) and clf.score is None


class LossEvaluator:
    """Source of the error masses P[A1 and not H] and P[A0 and H]."""

    def error_masses(self, clf) -> tuple[float, float]:
        raise NotImplementedError

    def threshold_error_masses(self, thresholds: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def best_thresholds(self, costs: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class AnalyticBinormalLoss(LossEvaluator):
    """Exact error masses of threshold classifiers {x > c} under the binormal source."""

    def __init__(self, params: BinormalParams, sweep_points: int = 4001):
        self.params = params
        lo = params.mu - 8 * params.sigma
        hi = params.nu + 8 * params.sigma
        self._sweep = np.concatenate([[-np.inf], np.linspace(lo, hi, sweep_points), [np.inf]])

    def threshold_error_masses(self, thresholds):
        c = np.asarray(thresholds, dtype=np.float64)
        prm = self.params
        fn = prm.p * norm_cdf((c - prm.nu) / prm.sigma)
        fp = (1 - prm.p) * norm_cdf(-(c - prm.mu) / prm.sigma)
        return fn, fp

    def cell_masses(self, clf) -> tuple[float, float, float, float]:
        """(true pos, false neg, false pos, true neg)."""
        fn, fp = self.error_masses(clf)
        return self.params.p - fn, fn, fp, (1 - self.params.p) - fp

    def error_masses(self, clf):
        if not _is_plain_threshold(clf):
            raise TypeError("the analytic backend handles threshold classifiers on the covariate only")
        fn, fp = self.threshold_error_masses(clf.threshold)
        return float(fn), float(fp)

    def bayes_threshold(self, t):
        """Covariate value where the posterior equals t; {x > c} is then {posterior > t}."""
        a, b = coefficients(self.params)
        t = np.asarray(t, dtype=np.float64)
        with np.errstate(divide="ignore"):
            logit_neg = np.log1p(-t) - np.log(t)
        return (logit_neg - b) / a

    def best_thresholds(self, costs):
        fn, fp = self.threshold_error_masses(self._sweep)
        out = np.empty(len(costs))
        for i, t in enumerate(np.asarray(costs, dtype=np.float64)):
            loss = (1 - t) * fn + t * fp
            out[i] = self._sweep[len(loss) - 1 - int(np.argmin(loss[::-1]))]
        return out


class EmpiricalLoss(LossEvaluator):
    """Error frequencies on a labeled source sample."""

    def __init__(self, sample: LabeledSample):
        if len(sample) == 0:
            raise ValueError("empty source sample")
        self.sample = sample
        order = np.argsort(sample.x, kind="stable")
        xs = sample.x[order]
        ys = sample.y[order]
        self._values, starts = np.unique(xs, return_index=True)
        pos_per_value = np.add.reduceat(ys.astype(np.float64), starts)
        cnt_per_value = np.diff(np.append(starts, xs.size)).astype(np.float64)
        self._cum_pos = np.concatenate([[0.0], np.cumsum(pos_per_value)])
        self._cum_neg = np.concatenate([[0.0], np.cumsum(cnt_per_value - pos_per_value)])
        self._n = float(xs.size)

    def threshold_error_masses(self, thresholds):
        c = np.asarray(thresholds, dtype=np.float64)
        k = np.searchsorted(self._values, c, side="right")  # values <= c predicted negative
        fn = self._cum_pos[k] / self._n
        fp = (self._cum_neg[-1] - self._cum_neg[k]) / self._n
        return fn, fp

    def error_masses(self, clf):
        if _is_plain_threshold(clf):
            fn, fp = self.threshold_error_masses(clf.threshold)
            return float(fn), float(fp)
        pred = np.asarray(clf(self.sample.x), dtype=bool)
        pos = self.sample.y == 1
        return float(np.sum(pos & ~pred)) / self._n, float(np.sum(~pos & pred)) / self._n

    def best_thresholds(self, costs):
        k = kernels.best_split_indices(self._cum_pos, self._cum_neg, np.asarray(costs, dtype=np.float64))
        candidates = np.concatenate([[-np.inf], self._values])
        return candidates[k]


def weighted_loss(clf, t: float, src: LossEvaluator) -> float:
    """(1 - t) P[A1 and not H] + t P[A0 and H]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("cost must lie in [0, 1]")
    fn, fp = src.error_masses(clf)
    return (1.0 - t) * fn + t * fp


class _LevelSet:
    """{x : Z(x) > t} for an ensemble that is not all thresholds."""

    def __init__(self, z_fn: Callable, t: float):
        self.z_fn = z_fn
        self.t = t

    def __call__(self, x):
        return self.z_fn(x) > self.t + TIE_TOL


@dataclass(frozen=True, eq=False)
class ProbingEnsemble:
    grid: CostGrid
    classifiers: tuple
    _thresholds: np.ndarray | None = field(init=False, repr=False)

    def __post_init__(self):
        clfs = tuple(self.classifiers)
        if len(clfs) != self.grid.n:
            raise ValueError("one classifier per grid point t_1..t_n is required")
        object.__setattr__(self, "classifiers", clfs)
        thr = None
        if all(_is_plain_threshold(c) for c in clfs):
            thr = np.array([c.threshold for c in clfs], dtype=np.float64)
        object.__setattr__(self, "_thresholds", thr)
        if thr is not None:
            order = np.argsort(thr, kind="stable")
            object.__setattr__(self, "_sorted_thr", thr[order])
            object.__setattr__(self, "_cum_w", np.concatenate([[0.0], np.cumsum(self.grid.weights[order])]))

    @classmethod
    def from_thresholds(cls, grid: CostGrid, thresholds: Sequence[float]) -> "ProbingEnsemble":
        return cls(grid, tuple(ThresholdClassifier(float(c)) for c in thresholds))

    @property
    def thresholds(self) -> np.ndarray | None:
        """Covariate thresholds when every member is {x > c}, else None."""
        return self._thresholds

    def z(self, x) -> np.ndarray:
        """Aggregate score sum (t_i - t_{i-1}) 1[x in H(t_i)]."""
        x = np.asarray(x, dtype=np.float64)
        if self._thresholds is not None:
            return kernels.step_sum(self._sorted_thr, self._cum_w, x)
        return self.z_direct(x)

    def z_direct(self, x) -> np.ndarray:
        """The aggregate evaluated member by member (no threshold shortcut)."""
        x = np.asarray(x, dtype=np.float64)
        z = np.zeros(x.shape)
        for w, clf in zip(self.grid.weights, self.classifiers):
            z += w * np.asarray(clf(x), dtype=bool)
        return z

    @property
    def z_fn(self) -> Callable:
        return self.z

    def level_set(self, t: float):
        """The classifier {Z > t}."""
        if self._thresholds is None:
            return _LevelSet(self.z, t)
        # Z is a nondecreasing step function of x, so {Z > t} = {x > c}
        above = np.flatnonzero(self._cum_w > t + TIE_TOL)
        if above.size == 0:
            return ThresholdClassifier(math.inf)
        k = int(above[0])
        return ThresholdClassifier(-math.inf if k == 0 else float(self._sorted_thr[k - 1]))

    def losses(self, src: LossEvaluator) -> np.ndarray:
        costs = self.grid.costs
        if self._thresholds is not None:
            fn, fp = src.threshold_error_masses(self._thresholds)
            return (1 - costs) * fn + costs * fp
        return np.array([weighted_loss(c, t, src) for c, t in zip(self.classifiers, costs)])


def _corrupt_threshold(src: LossEvaluator, c_opt: float, t: float, excess: float) -> float:
    def loss(c):
        fn, fp = src.threshold_error_masses(np.array([c]))
        return float((1 - t) * fn[0] + t * fp[0])

    best = loss(c_opt)
    target = (1 + excess) * best
    if best <= 0 or not math.isfinite(c_opt):
        return c_opt
    for direction in (1.0, -1.0):
        step = 0.01
        far = c_opt + direction * step
        while loss(far) < target and step < 1e3:
            step *= 2
            far = c_opt + direction * step
        if loss(far) < target:
            continue
        near = c_opt
        for _ in range(80):
            mid = 0.5 * (near + far)
            if loss(mid) < target:
                near = mid
            else:
                far = mid
        return far
    return c_opt


def corrupt_ensemble(ens: ProbingEnsemble, src: LossEvaluator, excess: float = 0.10) -> ProbingEnsemble:
    """Move every threshold until its loss is ``(1 + excess)`` times the original."""
    if ens.thresholds is None:
        raise TypeError("only threshold ensembles can be corrupted")
    new = [_corrupt_threshold(src, c, t, excess) for c, t in zip(ens.thresholds, ens.grid.costs)]
    return ProbingEnsemble.from_thresholds(ens.grid, new)


def fit_ensemble(grid: CostGrid, src: LossEvaluator, family: str = "bayes",
                 excess: float = 0.10) -> ProbingEnsemble:
    """One near-optimal classifier per cost t_1..t_n.

    ``bayes`` inverts the exact posterior (analytic backend only);
    ``empirical-threshold`` takes the best threshold of a sweep, ties going to
    the smaller positive region; ``corrupted`` degrades the fitted thresholds
    by ``excess`` relative loss to give the refinement step work to do.
    """
    if family == "bayes":
        if not isinstance(src, AnalyticBinormalLoss):
            raise TypeError("the bayes family needs the analytic binormal backend")
        return ProbingEnsemble.from_thresholds(grid, src.bayes_threshold(grid.costs))
    if family == "empirical-threshold":
        return ProbingEnsemble.from_thresholds(grid, src.best_thresholds(grid.costs))
    if family == "corrupted":
        base = fit_ensemble(grid, src, "bayes" if isinstance(src, AnalyticBinormalLoss)
                            else "empirical-threshold")
        return corrupt_ensemble(base, src, excess)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


@dataclass(frozen=True)
class RefineResult:
    ensemble: ProbingEnsemble
    converged: bool
    iterations: int
    replacements: int
    total_losses: tuple  # before the first pass, then after each pass


def refine(ens: ProbingEnsemble, src: LossEvaluator, max_iter: int = DEFAULT_MAX_ITER,
           improvement_eps: float = IMPROVEMENT_EPS) -> RefineResult:
    """Replace H(t_j) by {Z > t_j} wherever that lowers the loss by more than eps."""
    costs = ens.grid.costs
    losses = ens.losses(src)
    history = [float(losses.sum())]
    replacements = 0
    for it in range(1, max_iter + 1):
        candidates = [ens.level_set(t) for t in costs]
        cand_ens = ProbingEnsemble(ens.grid, tuple(candidates))
        cand_losses = cand_ens.losses(src)
        better = cand_losses < losses - improvement_eps
        if not better.any():
            return RefineResult(ens, True, it, replacements, tuple(history))
        members = tuple(c if b else old for c, old, b in zip(candidates, ens.classifiers, better))
        ens = ProbingEnsemble(ens.grid, members)
        losses = np.where(better, cand_losses, losses)
        replacements += int(better.sum())
        history.append(float(losses.sum()))
    return RefineResult(ens, False, max_iter, replacements, tuple(history))


@dataclass(frozen=True)
class ProbingResult:
    estimate: float
    iterations: int
    losses: np.ndarray
    converged: bool
    target_freqs: np.ndarray
    grid: CostGrid

    CSV_HEADER = "q_hat,iterations,converged"
    DUMP_HEADER = "i,t_i,loss_i,target_freq_i"

    def csv_row(self) -> str:
        return f"{self.estimate:.10g},{self.iterations},{str(self.converged).lower()}"

    def dump_rows(self) -> list[str]:
        return [f"{i},{t:.10g},{loss:.10g},{f:.10g}"
                for i, (t, loss, f) in enumerate(zip(self.grid.costs, self.losses, self.target_freqs), 1)]


def target_frequencies(ens: ProbingEnsemble, target: UnlabeledSample) -> np.ndarray:
    n = len(target)
    if ens.thresholds is not None:
        counts = kernels.upper_counts(np.sort(target.x), ens.thresholds)
        return counts / n
    return np.array([np.count_nonzero(c(target.x)) / n for c in ens.classifiers])


def estimate_prior(ens: ProbingEnsemble, target: UnlabeledSample, *, src: LossEvaluator | None = None,
                   iterations: int = 0, converged: bool = False) -> ProbingResult:
    """sum (t_i - t_{i-1}) * (target frequency of H(t_i))."""
    freqs = target_frequencies(ens, target)
    q_hat = math.fsum(ens.grid.weights * freqs)
    losses = ens.losses(src) if src is not None else np.full(ens.grid.n, np.nan)
    return ProbingResult(float(q_hat), iterations, losses, converged, freqs, ens.grid)


def probe(grid: CostGrid, src: LossEvaluator, target: UnlabeledSample, family: str = "bayes",
          max_iter: int = DEFAULT_MAX_ITER) -> ProbingResult:
    """Fit, refine and estimate in one call."""
    fitted = fit_ensemble(grid, src, family)
    refined = refine(fitted, src, max_iter)
    return estimate_prior(refined.ensemble, target, src=src,
                          iterations=refined.iterations, converged=refined.converged)
