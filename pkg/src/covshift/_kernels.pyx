# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_kernels_py`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isnan, INFINITY

cnp.import_array()


def cell_totals(mass, in_a, labels, Py_ssize_t ncells):
    cdef const double[:, ::1] m = np.ascontiguousarray(mass, dtype=np.float64)
    cdef const cnp.uint8_t[::1] a = np.ascontiguousarray(in_a, dtype=np.uint8)
    cdef const cnp.intp_t[::1] lab = np.ascontiguousarray(labels, dtype=np.intp)
    cdef Py_ssize_t rows = m.shape[0], n = m.shape[1], r, j, c
    tot_arr = np.zeros((rows, ncells))
    a_arr = np.zeros((rows, ncells))
    cdef double[:, ::1] tot = tot_arr
    cdef double[:, ::1] at = a_arr
    with nogil:
        for j in range(n):
            c = lab[j]
            for r in range(rows):
                tot[r, c] += m[r, j]
                if a[j]:
                    at[r, c] += m[r, j]
    return tot_arr, a_arr


def posterior_gaps(qmass, in_a, labels, Py_ssize_t ncells, ref_post):
    tot_arr, a_arr = cell_totals(qmass, in_a, labels, ncells)
    cdef const double[:, ::1] tot = tot_arr
    cdef const double[:, ::1] at = a_arr
    cdef const double[::1] ref = np.ascontiguousarray(ref_post, dtype=np.float64)
    cdef Py_ssize_t rows = tot.shape[0], r, c
    gaps_arr = np.zeros(rows)
    cdef double[::1] gaps = gaps_arr
    cdef double g
    with nogil:
        for r in range(rows):
            for c in range(ncells):
                if tot[r, c] > 0.0:
                    if isnan(ref[c]):
                        gaps[r] = INFINITY
                    else:
                        g = fabs(at[r, c] / tot[r, c] - ref[c])
                        if g > gaps[r]:
                            gaps[r] = g
    return gaps_arr


def best_split_indices(cum_pos, cum_neg, costs):
    cdef const double[::1] cp = np.ascontiguousarray(cum_pos, dtype=np.float64)
    cdef const double[::1] cn = np.ascontiguousarray(cum_neg, dtype=np.float64)
    cdef const double[::1] ts = np.ascontiguousarray(costs, dtype=np.float64)
    cdef Py_ssize_t m = cp.shape[0], nt = ts.shape[0], i, k, best
    out_arr = np.empty(nt, dtype=np.intp)
    cdef cnp.intp_t[::1] out = out_arr
    cdef double t, loss, best_loss, total_neg = cn[m - 1]
    with nogil:
        for i in range(nt):
            t = ts[i]
            best = 0
            best_loss = (1.0 - t) * cp[0] + t * (total_neg - cn[0])
            for k in range(1, m):
                loss = (1.0 - t) * cp[k] + t * (total_neg - cn[k])
                if loss <= best_loss:
                    best_loss = loss
                    best = k
            out[i] = best
    return out_arr


cdef inline Py_ssize_t _count_below(const double[::1] s, double v) noexcept nogil:
    # number of entries strictly below v
    cdef Py_ssize_t lo = 0, hi = s.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if s[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _count_at_most(const double[::1] s, double v) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = s.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if s[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def step_sum(sorted_thr, cum_w, x):
    cdef const double[::1] thr = np.ascontiguousarray(sorted_thr, dtype=np.float64)
    cdef const double[::1] cw = np.ascontiguousarray(cum_w, dtype=np.float64)
    xs_arr = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] xs = xs_arr.ravel()
    cdef Py_ssize_t n = xs.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = cw[_count_below(thr, xs[i])]
    return out_arr.reshape(xs_arr.shape)


def upper_counts(sorted_x, thresholds):
    cdef const double[::1] s = np.ascontiguousarray(sorted_x, dtype=np.float64)
    cdef const double[::1] th = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = s.shape[0], m = th.shape[0], i
    out_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    with nogil:
        for i in range(m):
            out[i] = n - _count_at_most(s, th[i])
    return out_arr
