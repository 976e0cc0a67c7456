# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 simplex loop; mirrors ``_simplex_py.simplex_core``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _pivot(double[:, ::1] T, double[::1] obj, cnp.int64_t[::1] basis,
                 Py_ssize_t r, Py_ssize_t j) nogil:
    cdef Py_ssize_t i, k
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t w = T.shape[1]
    cdef double p = T[r, j]
    cdef double f
    for k in range(w):
        T[r, k] /= p
    for i in range(m):
        if i != r:
            f = T[i, j]
            if f != 0.0:
                for k in range(w):
                    T[i, k] -= f * T[r, k]
    f = obj[j]
    if f != 0.0:
        for k in range(w):
            obj[k] -= f * T[r, k]
    basis[r] = j


def simplex_core(double[:, ::1] T, double[::1] obj, cnp.int64_t[::1] basis,
                 Py_ssize_t n_allowed, double eps, Py_ssize_t max_iter):
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it, i, j, k, r
    cdef double a, ratio, best = 0.0
    with nogil:
        for it in range(max_iter):
            j = -1
            for k in range(n_allowed):
                if obj[k] < -eps:
                    j = k
                    break
            if j < 0:
                with gil:
                    return 0, it
            r = -1
            for i in range(m):
                a = T[i, j]
                if a > eps:
                    ratio = T[i, rhs] / a
                    if r < 0 or ratio < best - eps or (ratio <= best + eps and basis[i] < basis[r]):
                        r = i
                        best = ratio
            if r < 0:
                with gil:
                    return 1, it
            _pivot(T, obj, basis, r, j)
    return 2, max_iter
