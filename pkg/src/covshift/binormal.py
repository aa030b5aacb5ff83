"""Equal-variance binormal model: exact posterior, true and discretised target
priors, and the data behind the two analytic figures."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate, special

from .errors import QuadratureError
from .samples import LabeledSample, UnlabeledSample

TINY = 1e-300


@dataclass(frozen=True)
class BinormalParams:
    mu: float = 0.0
    nu: float = 1.5
    sigma: float = 1.0
    p: float = 0.3
    tau: float = 2.5

    def __post_init__(self):
        for name in ("mu", "nu", "sigma", "p", "tau"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.mu < self.nu:
            raise ValueError("need mu < nu")
        if not self.sigma > 0:
            raise ValueError("need sigma > 0")
        if not 0 < self.p < 1:
            raise ValueError("need 0 < p < 1")

    @property
    def target_sigma(self) -> float:
        """Std. dev. of the target covariate; equals the source marginal's."""
        return math.sqrt(self.sigma**2 + self.p * (1 - self.p) * (self.mu - self.nu) ** 2)


DEFAULT_PARAMS = BinormalParams()


class PosteriorCoefficients(NamedTuple):
    a: float
    b: float


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "adaptive"  # or "gauss-hermite"
    nodes: int = 64
    tol: float = 1e-8

    def __post_init__(self):
        if self.method not in ("adaptive", "gauss-hermite"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.nodes < 3:
            raise ValueError("need at least 3 nodes")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


DEFAULT_QUAD = QuadratureConfig()


def coefficients(params: BinormalParams) -> PosteriorCoefficients:
    s2 = params.sigma**2
    a = (params.mu - params.nu) / s2
    b = (params.nu**2 - params.mu**2) / (2 * s2) + math.log((1 - params.p) / params.p)
    return PosteriorCoefficients(a, b)


def posterior(x, params: BinormalParams):
    """P[positive | X = x] = 1 / (1 + exp(a x + b))."""
    a, b = coefficients(params)
    out = special.expit(-(a * np.asarray(x, dtype=np.float64) + b))
    return float(out) if np.ndim(out) == 0 else out


_SQRT2 = math.sqrt(2.0)
_SQRT2_LO = -9.667293313452913e-17  # sqrt(2) - _SQRT2
_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    """a*b rounded, and the rounding error (Dekker)."""
    p = a * b
    t = _SPLIT * a
    a_hi = t - (t - a)
    a_lo = a - a_hi
    t = _SPLIT * b
    b_hi = t - (t - b)
    b_lo = b - b_hi
    return p, ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo


def norm_cdf(z):
    """Standard normal CDF, 0.5 * erfc(-z / sqrt 2), with the argument rounding
    compensated.

    Rounding -z/sqrt(2) costs a relative error of about z^2 ulp in the lower
    tail (1e-14 near z = -8); a first-order erfc correction removes it.
    """
    z = np.asarray(z, dtype=np.float64)
    x = -z / _SQRT2
    with np.errstate(invalid="ignore", over="ignore"):
        p, e = _two_prod(x, _SQRT2)
        resid = ((-z - p) - e) - x * _SQRT2_LO
        dx = np.where(np.isfinite(z), resid / _SQRT2, 0.0)
        out = 0.5 * special.erfc(x) - np.exp(-x * x) * dx / math.sqrt(math.pi)
    return float(out) if out.ndim == 0 else out


def gaussian_expectation(fn, mean: float, sd: float, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """E[fn(Z)] for Z ~ Normal(mean, sd^2); ``fn`` must be bounded by 1 in absolute value."""
    if quad.method == "gauss-hermite":
        nodes, weights = np.polynomial.hermite.hermgauss(quad.nodes)
        return float(np.dot(weights, fn(mean + math.sqrt(2.0) * sd * nodes)) / math.sqrt(math.pi))
    # tails beyond 10 sd carry mass < 1e-22, below any useful tolerance
    lo, hi = mean - 10 * sd, mean + 10 * sd
    density = lambda x: fn(x) * math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))
    value, err = integrate.quad(density, lo, hi, epsabs=quad.tol, epsrel=0.0, limit=200, points=[mean])
    if err > quad.tol:
        raise QuadratureError("adaptive quadrature did not reach the tolerance", err)
    return float(value)


def true_target_prior(params: BinormalParams, quad: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Q[positive] = E_Q[posterior(X)] with X ~ Normal(tau, target_sigma^2)."""
    return gaussian_expectation(lambda x: posterior(x, params), params.tau, params.target_sigma, quad)


def true_target_prior_mc(params: BinormalParams, n: int = 10**7, seed=0,
                         chunk: int = 10**6) -> tuple[float, float]:
    """Monte Carlo estimate of the target prior and its standard error."""
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < n:
        m = min(chunk, n - done)
        v = posterior(rng.normal(params.tau, params.target_sigma, size=m), params)
        total += float(v.sum())
        total_sq += float(np.dot(v, v))
        done += m
    mean = total / n
    var = max(total_sq / n - mean**2, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)


def class_means_of_posterior(params: BinormalParams,
                             quad: QuadratureConfig = DEFAULT_QUAD) -> tuple[float, float]:
    """(m0, m1): expected posterior under the negative and positive class laws."""
    post = lambda x: posterior(x, params)
    m0 = gaussian_expectation(post, params.mu, params.sigma, quad)
    m1 = gaussian_expectation(post, params.nu, params.sigma, quad)
    return m0, m1


def split_posteriors(params: BinormalParams, x: float) -> tuple[float, float, float]:
    """(P[X <= x], P[pos | X <= x], P[pos | X > x]) with limits at the extremes."""
    z1 = (x - params.nu) / params.sigma
    z0 = (x - params.mu) / params.sigma
    p = params.p
    pos_below = p * norm_cdf(z1)
    below = pos_below + (1 - p) * norm_cdf(z0)
    # upper tails via ndtr(-z) avoid the cancellation in 1 - Phi(z)
    pos_above = p * norm_cdf(-z1)
    above = pos_above + (1 - p) * norm_cdf(-z0)
    post_below = pos_below / below if below >= TINY else 0.0
    post_above = pos_above / above if above >= TINY else 1.0
    return float(below), float(post_below), float(post_above)


def pseudo_prior(params: BinormalParams, x: float) -> float:
    """Target prior from the single split {X <= x}, pretending covariate shift
    holds for the split."""
    if x == -math.inf or x == math.inf:
        return params.p
    _, post_below, post_above = split_posteriors(params, x)
    q_below = float(norm_cdf((x - params.tau) / params.target_sigma))
    return q_below * post_below + (1.0 - q_below) * post_above


class Figure2Row(NamedTuple):
    x: float
    pseudo_prior: float
    true_prior: float


class Figure1Row(NamedTuple):
    q: float
    pps_estimate: float
    cs_estimate: float


def figure2_grid() -> np.ndarray:
    return np.round(np.arange(-300, 801) * 0.01, 10)


def figure1_grid() -> np.ndarray:
    return np.round(np.arange(101) * 0.01, 10)


def figure2_curve(params: BinormalParams = DEFAULT_PARAMS, x_grid: Sequence[float] | None = None,
                  quad: QuadratureConfig = DEFAULT_QUAD) -> list[Figure2Row]:
    xs = figure2_grid() if x_grid is None else np.asarray(x_grid, dtype=np.float64)
    if np.any(np.diff(xs) < 0):
        raise ValueError("x grid must be sorted")
    truth = true_target_prior(params, quad)
    return [Figure2Row(float(x), pseudo_prior(params, float(x)), truth) for x in xs]


def figure1_curves(params: BinormalParams = DEFAULT_PARAMS, q_grid: Sequence[float] | None = None,
                   quad: QuadratureConfig = DEFAULT_QUAD) -> list[Figure1Row]:
    """Prior estimates on mixture-weight-q targets.

    The prior-shift estimator is Fisher consistent and returns q; probability
    averaging with the fixed source posterior returns q*m1 + (1-q)*m0.
    """
    qs = figure1_grid() if q_grid is None else np.asarray(q_grid, dtype=np.float64)
    if np.any((qs < 0) | (qs > 1)):
        raise ValueError("q grid must lie in [0, 1]")
    m0, m1 = class_means_of_posterior(params, quad)
    return [Figure1Row(float(q), float(q), float(q * m1 + (1 - q) * m0)) for q in qs]


def _draw_mixture(params: BinormalParams, weight: float, n: int, seed):
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    y = (rng.random(n) < weight).astype(np.int8)
    x = rng.normal(0.0, params.sigma, size=n) + np.where(y == 1, params.nu, params.mu)
    return x, y


def sample_source(params: BinormalParams, n: int, seed) -> LabeledSample:
    x, y = _draw_mixture(params, params.p, n, seed)
    return LabeledSample(x, y, seed)


def sample_target_cs(params: BinormalParams, n: int, seed) -> UnlabeledSample:
    """Covariate-shift target: X ~ Normal(tau, target_sigma^2)."""
    if n < 1:
        raise ValueError("n must be positive")
    return UnlabeledSample(np.random.default_rng(seed).normal(params.tau, params.target_sigma, size=n), seed)


def sample_target_pps(params: BinormalParams, q: float, n: int, seed) -> UnlabeledSample:
    """Prior-shift target: the source class laws mixed with weight q."""
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    x, _ = _draw_mixture(params, q, n, seed)
    return UnlabeledSample(x, seed)


def source_marginal_cdf(params: BinormalParams, x):
    return (params.p * norm_cdf((np.asarray(x) - params.nu) / params.sigma)
            + (1 - params.p) * norm_cdf((np.asarray(x) - params.mu) / params.sigma))
