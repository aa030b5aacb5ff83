"""The compiled kernels and the numpy fallback must agree exactly."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from covshift import _kernels_py as py
from covshift import kernels

try:
    from covshift import _kernels as ext
except ImportError:  # fallback-only install
    ext = None

needs_ext = pytest.mark.skipif(ext is None, reason="compiled extension not built")
finite = st.floats(-50, 50, allow_nan=False)


def test_backend_name():
    assert kernels.BACKEND in ("compiled", "python")


@st.composite
def cell_inputs(draw):
    rows = draw(st.integers(1, 5))
    n = draw(st.integers(2, 12))
    mass = draw(hnp.arrays(np.float64, (rows, n), elements=st.floats(0, 1)))
    labels = np.array(draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n)))
    _, labels = np.unique(labels, return_inverse=True)
    in_a = draw(hnp.arrays(np.bool_, n))
    return mass, in_a, labels.astype(np.intp), int(labels.max()) + 1


@needs_ext
@settings(max_examples=200, deadline=None)
@given(cell_inputs())
def test_cell_totals(inp):
    mass, in_a, labels, k = inp
    for a, b in zip(py.cell_totals(mass, in_a, labels, k), ext.cell_totals(mass, in_a, labels, k)):
        assert np.array_equal(a, b)


@needs_ext
@settings(max_examples=200, deadline=None)
@given(cell_inputs(), st.data())
def test_posterior_gaps(inp, data):
    mass, in_a, labels, k = inp
    ref = np.array(data.draw(st.lists(st.one_of(st.floats(0, 1), st.just(np.nan)), min_size=k, max_size=k)))
    assert np.array_equal(py.posterior_gaps(mass, in_a, labels, k, ref),
                          ext.posterior_gaps(mass, in_a, labels, k, ref))


def test_posterior_gap_values():
    mass = np.array([[0.25, 0.25, 0.5, 0.0]])
    labels = np.array([0, 0, 1, 1])
    in_a = np.array([True, False, True, False])
    for mod in filter(None, (py, ext)):
        gaps = mod.posterior_gaps(mass, in_a, labels, 2, np.array([0.5, 0.25]))
        assert gaps[0] == pytest.approx(0.75)
        assert np.isinf(mod.posterior_gaps(mass, in_a, labels, 2, np.array([0.5, np.nan]))[0])


@needs_ext
@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=40),
       st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_best_split_indices(pairs, costs):
    pos, neg = np.array(pairs).T
    cum_pos = np.concatenate([[0.0], np.cumsum(pos)])
    cum_neg = np.concatenate([[0.0], np.cumsum(neg)])
    assert np.array_equal(py.best_split_indices(cum_pos, cum_neg, costs),
                          ext.best_split_indices(cum_pos, cum_neg, costs))


def test_best_split_ties_go_right():
    cum = np.zeros(5)
    for mod in filter(None, (py, ext)):
        assert list(mod.best_split_indices(cum, cum, [0.3])) == [4]


@needs_ext
@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=1, max_size=30), st.lists(finite, min_size=1, max_size=30))
def test_step_sum_and_counts(thr, xs):
    thr = np.sort(np.array(thr))
    cum_w = np.concatenate([[0.0], np.cumsum(np.full(thr.size, 0.1))])
    x = np.array(xs)
    assert np.array_equal(py.step_sum(thr, cum_w, x), ext.step_sum(thr, cum_w, x))
    assert np.array_equal(py.upper_counts(np.sort(x), thr), ext.upper_counts(np.sort(x), thr))


def test_upper_counts_values():
    for mod in filter(None, (py, ext)):
        assert list(mod.upper_counts(np.array([1.0, 2.0, 2.0, 3.0]), np.array([-np.inf, 2.0, 3.0, np.inf]))) == [4, 1, 0, 0]
        assert list(mod.step_sum(np.array([1.0, 2.0]), np.array([0.0, 0.5, 1.0]),
                                 np.array([0.0, 1.0, 1.5, 2.5]))) == [0.0, 0.0, 0.5, 1.0]
