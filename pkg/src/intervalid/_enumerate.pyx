# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled vertex-enumeration kernel; see ``_enumerate_py`` for the contract."""

import numpy as np


def enumerate_extrema(const double[::1] vdist,
                      const Py_ssize_t[:, ::1] base,
                      const Py_ssize_t[:, ::1] slot,
                      const Py_ssize_t[::1] stride,
                      const Py_ssize_t[::1] radix,
                      const Py_ssize_t[:, ::1] col_of,
                      const Py_ssize_t[::1] q_off):
    cdef Py_ssize_t n_states = base.shape[0]
    cdef Py_ssize_t n_nodes = base.shape[1]
    cdef Py_ssize_t n_slots = radix.shape[0]
    cdef Py_ssize_t n_queries = col_of.shape[0]
    cdef Py_ssize_t n_cols = q_off[n_queries]
    cdef Py_ssize_t s, k, q, c, j, sl
    cdef double p, den, v

    lo_arr = np.full(n_cols, np.inf)
    hi_arr = np.full(n_cols, -np.inf)
    valid_arr = np.zeros(n_queries, dtype=np.int64)
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef long long[::1] valid = valid_arr
    cdef double[::1] joint = np.empty(n_states)
    cdef double[::1] num = np.empty(max(n_cols, 1))
    cdef Py_ssize_t[::1] digit = np.zeros(max(n_slots, 1), dtype=np.intp)

    while True:
        for s in range(n_states):
            p = 1.0
            for k in range(n_nodes):
                p *= vdist[base[s, k] + digit[slot[s, k]] * stride[k]]
            joint[s] = p
        for c in range(n_cols):
            num[c] = 0.0
        for q in range(n_queries):
            for s in range(n_states):
                c = col_of[q, s]
                if c >= 0:
                    num[q_off[q] + c] += joint[s]
        for q in range(n_queries):
            den = 0.0
            for c in range(q_off[q], q_off[q + 1]):
                den += num[c]
            if den > 0.0:
                valid[q] += 1
                for c in range(q_off[q], q_off[q + 1]):
                    v = num[c] / den
                    if v < lo[c]:
                        lo[c] = v
                    if v > hi[c]:
                        hi[c] = v
        # odometer over slots, last slot fastest (matches numpy unravel order)
        j = n_slots - 1
        while j >= 0:
            digit[j] += 1
            if digit[j] < radix[j]:
                break
            digit[j] = 0
            j -= 1
        if j < 0:
            break
    return lo_arr, hi_arr, valid_arr
