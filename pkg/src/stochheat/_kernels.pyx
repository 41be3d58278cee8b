# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels; see ``_kernels_py.py`` for the reference version."""
from libc.stdint cimport uint32_t, uint64_t
from scipy.special.cython_special cimport ndtri

import numpy as np

BACKEND = "cython"

cdef uint32_t M0 = 0xD2511F53u
cdef uint32_t M1 = 0xCD9E8D57u
cdef uint32_t W0 = 0x9E3779B9u
cdef uint32_t W1 = 0xBB67AE85u
cdef double TWO_M53 = 1.1102230246251565e-16


cdef inline void _philox(uint32_t* c, uint32_t k0, uint32_t k1) noexcept nogil:
    cdef uint64_t p0, p1
    cdef uint32_t t0, t1, t2, t3
    cdef int r
    for r in range(10):
        if r:
            k0 = k0 + W0
            k1 = k1 + W1
        p0 = <uint64_t>M0 * c[0]
        p1 = <uint64_t>M1 * c[2]
        t0 = <uint32_t>(p1 >> 32) ^ c[1] ^ k0
        t1 = <uint32_t>p1
        t2 = <uint32_t>(p0 >> 32) ^ c[3] ^ k1
        t3 = <uint32_t>p0
        c[0] = t0
        c[1] = t1
        c[2] = t2
        c[3] = t3


cdef inline double _open_uniform(uint32_t hi, uint32_t lo) noexcept nogil:
    cdef uint64_t bits = ((<uint64_t>hi << 32) | lo) >> 12
    return (2.0 * <double>bits + 1.0) * TWO_M53


def philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3, uint32_t k0, uint32_t k1):
    cdef uint32_t c[4]
    c[0] = c0
    c[1] = c1
    c[2] = c2
    c[3] = c3
    _philox(c, k0, k1)
    return c[0], c[1], c[2], c[3]


cdef void _batch(uint64_t seed, uint64_t start, Py_ssize_t count,
                 const double[::1] decay, const double[::1] cov_over_h,
                 const double[::1] cond_sd, double sqrt_h, Py_ssize_t n_scheme,
                 Py_ssize_t steps, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, k, j
    cdef Py_ssize_t n_modes = decay.shape[0]
    cdef uint64_t sample
    cdef uint32_t c[4]
    cdef uint32_t k0 = <uint32_t>seed
    cdef uint32_t k1 = <uint32_t>(seed >> 32)
    cdef double total, exact, scheme, d, cv, sd, xi1, xi2, dw, inc, diff
    for i in range(count):
        sample = start + <uint64_t>i
        total = 0.0
        for k in range(n_modes):
            exact = 0.0
            scheme = 0.0
            d = decay[k]
            cv = cov_over_h[k]
            sd = cond_sd[k]
            for j in range(steps):
                c[0] = <uint32_t>j
                c[1] = <uint32_t>(k + 1)
                c[2] = <uint32_t>sample
                c[3] = <uint32_t>(sample >> 32)
                _philox(c, k0, k1)
                xi1 = ndtri(_open_uniform(c[0], c[1]))
                xi2 = ndtri(_open_uniform(c[2], c[3]))
                dw = sqrt_h * xi1
                inc = cv * dw + sd * xi2
                exact = d * exact + inc
                if k < n_scheme:
                    scheme = d * (scheme + dw)
            diff = exact - scheme
            total = total + diff * diff
        out[i] = total


def coupled_terminal_batch(uint64_t seed, uint64_t start, Py_ssize_t count,
                           decay, cov_over_h, cond_sd, double sqrt_h,
                           Py_ssize_t n_scheme, Py_ssize_t steps):
    cdef double[::1] d = np.ascontiguousarray(decay, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(cov_over_h, dtype=np.float64)
    cdef double[::1] sd = np.ascontiguousarray(cond_sd, dtype=np.float64)
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] view = out
    with nogil:
        _batch(seed, start, count, d, cv, sd, sqrt_h, n_scheme, steps, view)
    return out
