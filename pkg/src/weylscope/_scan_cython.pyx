# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``weylscope._scan_numpy``.

Fuses the beta/power/parity arithmetic into one pass so no (P, K*N)
temporaries beyond the output are materialised.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline double complex _inv_pow(double beta, double off, int npow) noexcept:
    cdef double complex z = beta + 1j * off
    cdef double complex acc = z
    cdef int j
    for j in range(npow - 1):
        acc = acc * z
    return 1.0 / acc


def rational_table(double[:, ::1] xs, double[:, ::1] lam, double eps, int npow):
    cdef Py_ssize_t p_count = xs.shape[0]
    cdef Py_ssize_t k_count = xs.shape[1]
    cdef Py_ssize_t n_eig = lam.shape[1]
    out_arr = np.empty((p_count, k_count * n_eig), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t p, k, i
    cdef double xk
    cdef double complex g
    for p in range(p_count):
        for k in range(k_count):
            xk = xs[p, k]
            for i in range(n_eig):
                g = _inv_pow(xk - lam[k, i], eps, npow)
                if npow % 2 == 0:
                    out[p, k * n_eig + i] = 2.0 * g.real
                else:
                    out[p, k * n_eig + i] = 2j * g.imag
    return out_arr


def kernel_table(double[:, ::1] xs, double[:, ::1] lam, double x0, int npow):
    cdef Py_ssize_t p_count = xs.shape[0]
    cdef Py_ssize_t k_count = xs.shape[1]
    cdef Py_ssize_t n_eig = lam.shape[1]
    out_arr = np.empty((p_count, k_count * n_eig), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t p, k, i
    cdef double xk
    for p in range(p_count):
        for k in range(k_count):
            xk = xs[p, k]
            for i in range(n_eig):
                out[p, k * n_eig + i] = _inv_pow(xk - lam[k, i], x0, npow)
    return out_arr
