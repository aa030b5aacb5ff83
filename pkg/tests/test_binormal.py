"""Binormal model against frozen high-precision values and sampling laws.

The frozen constants were computed once with mpmath at 30 significant digits
from the closed forms (posterior coefficients, Phi ratios) and by mpmath.quad
for the Gaussian expectations.
"""
import math

import numpy as np
import pytest
from scipy import stats

from covshift.binormal import (
    DEFAULT_PARAMS,
    BinormalParams,
    QuadratureConfig,
    class_means_of_posterior,
    coefficients,
    figure1_curves,
    figure2_curve,
    gaussian_expectation,
    norm_cdf,
    posterior,
    pseudo_prior,
    sample_source,
    sample_target_cs,
    sample_target_pps,
    source_marginal_cdf,
    split_posteriors,
    true_target_prior,
    true_target_prior_mc,
)
from covshift.errors import QuadratureError

mpmath = pytest.importorskip("mpmath")

B_EXACT = 1.97229786038720368
X_HALF = 1.31486524025813578
POST_AT_0 = 0.122142288071616470
TRUE_PRIOR = 0.761021695326496321
M0, M1 = 0.193309125769215669, 0.548945373205163411
PSEUDO_25 = 0.591274799047268881
PSEUDO_MAX, PSEUDO_ARGMAX = 0.650126720324731614, 1.73
PSEUDO_LEFT, PSEUDO_RIGHT = 0.300282160660432778, 0.300002040304696459


class TestParams:
    def test_invariants(self):
        with pytest.raises(ValueError):
            BinormalParams(mu=1.0, nu=1.0)
        with pytest.raises(ValueError):
            BinormalParams(sigma=0.0)
        with pytest.raises(ValueError):
            BinormalParams(p=1.0)
        with pytest.raises(ValueError):
            QuadratureConfig("gauss-hermite", nodes=2)
        with pytest.raises(ValueError):
            QuadratureConfig(tol=0.0)

    def test_target_sigma(self):
        assert DEFAULT_PARAMS.target_sigma ** 2 == pytest.approx(1.4725, abs=1e-15)

    def test_coefficients(self):
        a, b = coefficients(DEFAULT_PARAMS)
        assert a == -1.5
        assert b == pytest.approx(1.125 + math.log(7 / 3), abs=1e-15)
        assert b == pytest.approx(B_EXACT, abs=1e-12)
        assert coefficients(BinormalParams(mu=-1.0, nu=1.0, p=0.5)).b == 0.0


class TestPosterior:
    def test_values(self):
        assert posterior(X_HALF, DEFAULT_PARAMS) == pytest.approx(0.5, abs=1e-15)
        assert posterior(0.0, DEFAULT_PARAMS) == pytest.approx(POST_AT_0, rel=1e-14)
        assert posterior(1e6, DEFAULT_PARAMS) == 1.0
        assert posterior(-1e6, DEFAULT_PARAMS) == 0.0

    def test_no_overflow_far_out(self):
        with np.errstate(all="raise"):
            vals = posterior(np.array([-500.0, -460.0, 470.0, 500.0]), DEFAULT_PARAMS)
        assert np.all(np.isfinite(vals))

    def test_increasing(self):
        v = posterior(np.linspace(-10, 10, 5001), DEFAULT_PARAMS)
        assert np.all(np.diff(v) >= 0) and v[-1] > v[0]


def test_norm_cdf_relative_accuracy():
    mpmath.mp.dps = 40
    z = np.concatenate([np.linspace(-8, 8, 4001), [-7.74, -7.7, -5.5, 0.0]])
    ours = norm_cdf(z)
    worst = max(abs(o - float(mpmath.ncdf(mpmath.mpf(float(x))))) / float(mpmath.ncdf(mpmath.mpf(float(x))))
                for o, x in zip(ours, z))
    assert worst < 1e-14
    assert norm_cdf(0.0) == 0.5 and norm_cdf(-np.inf) == 0.0 and norm_cdf(np.inf) == 1.0


class TestTruePrior:
    def test_adaptive(self):
        assert true_target_prior(DEFAULT_PARAMS) == pytest.approx(TRUE_PRIOR, abs=1e-9)

    def test_gauss_hermite(self):
        gh = true_target_prior(DEFAULT_PARAMS, QuadratureConfig("gauss-hermite", nodes=64))
        assert gh == pytest.approx(TRUE_PRIOR, abs=1e-9)
        sketch = true_target_prior(DEFAULT_PARAMS, QuadratureConfig("gauss-hermite", nodes=3))
        assert round(sketch, 3) == 0.769

    def test_symmetric_case(self):
        prm = BinormalParams(mu=-1.0, nu=1.0, p=0.5, tau=0.0)
        assert true_target_prior(prm) == pytest.approx(0.5, abs=1e-12)

    def test_far_left_target(self):
        assert true_target_prior(BinormalParams(tau=-60.0)) < 1e-12

    def test_monte_carlo_agrees(self):
        mc, se = true_target_prior_mc(DEFAULT_PARAMS, n=10**6, seed=3)
        assert abs(mc - TRUE_PRIOR) <= 3 * se

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_quadrature_error_carries_residual(self):
        with pytest.raises(QuadratureError) as info:
            gaussian_expectation(lambda x: np.sin(40 * x) ** 2 * np.exp(x / 3), 0.0, 30.0,
                                 QuadratureConfig(tol=1e-14))
        assert info.value.residual > 0

    def test_source_total_expectation(self):
        for prm in (DEFAULT_PARAMS, BinormalParams(-2.0, 3.0, 0.7, 0.11, 0.0), BinormalParams(1.0, 1.2, 2.0, 0.5)):
            m0, m1 = class_means_of_posterior(prm)
            assert prm.p * m1 + (1 - prm.p) * m0 == pytest.approx(prm.p, abs=1e-6)


class TestPseudoPrior:
    def test_value(self):
        assert pseudo_prior(DEFAULT_PARAMS, 2.5) == pytest.approx(PSEUDO_25, abs=1e-12)

    def test_limits(self):
        assert pseudo_prior(DEFAULT_PARAMS, -math.inf) == 0.3
        assert pseudo_prior(DEFAULT_PARAMS, math.inf) == 0.3
        assert pseudo_prior(DEFAULT_PARAMS, -3.0) == pytest.approx(PSEUDO_LEFT, abs=1e-12)
        assert pseudo_prior(DEFAULT_PARAMS, 8.0) == pytest.approx(PSEUDO_RIGHT, abs=1e-12)
        assert pseudo_prior(DEFAULT_PARAMS, 60.0) == pytest.approx(0.3, abs=1e-12)
        assert pseudo_prior(DEFAULT_PARAMS, -60.0) == pytest.approx(0.3, abs=1e-12)

    def test_split_guards(self):
        below, post_below, post_above = split_posteriors(DEFAULT_PARAMS, 60.0)
        assert below == 1.0 and post_above == 1.0
        below, post_below, post_above = split_posteriors(DEFAULT_PARAMS, -60.0)
        assert below == 0.0 and post_below == 0.0 and 0 < post_above < 1

    def test_convex_combination(self):
        for x in np.linspace(-5, 10, 301):
            _, lo, hi = split_posteriors(DEFAULT_PARAMS, float(x))
            assert min(lo, hi) - 1e-15 <= pseudo_prior(DEFAULT_PARAMS, float(x)) <= max(lo, hi) + 1e-15


class TestFigures:
    def test_figure2(self):
        rows = figure2_curve()
        assert len(rows) == 1101 and rows[0].x == -3.0 and rows[-1].x == 8.0
        assert len({r.true_prior for r in rows}) == 1
        best = max(rows, key=lambda r: r.pseudo_prior)
        assert best.pseudo_prior == pytest.approx(PSEUDO_MAX, abs=1e-12)
        assert best.x == pytest.approx(PSEUDO_ARGMAX)
        assert rows[0].true_prior - best.pseudo_prior >= 0.1
        at = next(r for r in rows if abs(r.x - 2.5) < 1e-9)
        assert at.pseudo_prior == pseudo_prior(DEFAULT_PARAMS, 2.5)

    def test_figure2_continuity(self):
        ys = np.array([r.pseudo_prior for r in figure2_curve()])
        assert np.max(np.abs(np.diff(ys))) < 0.01

    def test_figure2_unsorted_grid(self):
        with pytest.raises(ValueError):
            figure2_curve(x_grid=[1.0, 0.0])

    def test_figure1(self):
        rows = figure1_curves()
        assert len(rows) == 101
        assert rows[0].cs_estimate == pytest.approx(M0, abs=1e-9)
        assert rows[-1].cs_estimate == pytest.approx(M1, abs=1e-9)
        assert rows[30].cs_estimate == pytest.approx(0.3, abs=1e-9)
        assert all(r.pps_estimate == r.q for r in rows)
        with pytest.raises(ValueError):
            figure1_curves(q_grid=[1.2])


class TestSamplers:
    def test_source(self):
        n = 10**6
        s = sample_source(DEFAULT_PARAMS, n, seed=5)
        assert abs(s.y.mean() - 0.3) <= 3 * math.sqrt(0.21 / n)
        x1 = s.x[s.y == 1]
        assert abs(x1.mean() - 1.5) <= 3 / math.sqrt(x1.size)
        again = sample_source(DEFAULT_PARAMS, n, seed=5)
        assert np.array_equal(s.x, again.x) and np.array_equal(s.y, again.y)

    def test_cs_target_variance(self):
        n = 10**6
        x = sample_target_cs(DEFAULT_PARAMS, n, seed=6).x
        var = 1.4725
        assert abs(x.var(ddof=1) - var) <= 3 * var * math.sqrt(2 / (n - 1))
        assert np.array_equal(x, sample_target_cs(DEFAULT_PARAMS, n, seed=6).x)

    def test_pps_at_source_prior_matches_source_law(self):
        n = 10**5
        x = sample_target_pps(DEFAULT_PARAMS, 0.3, n, seed=7).x
        d_one = stats.kstest(x, lambda v: source_marginal_cdf(DEFAULT_PARAMS, v)).statistic
        assert d_one < 1.63 / math.sqrt(n)
        d_two = stats.ks_2samp(x, sample_source(DEFAULT_PARAMS, n, seed=8).x).statistic
        assert d_two < 1.63 * math.sqrt(2 / n)

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            sample_target_pps(DEFAULT_PARAMS, 1.5, 10, seed=0)
        with pytest.raises(ValueError):
            sample_source(DEFAULT_PARAMS, 0, seed=0)
