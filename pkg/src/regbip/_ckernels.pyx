# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled residue-ring kernels. Contract is shared with ``_pykernels``.

All arrays are int64 residues in [0, m) with m < 2**31; sparse operands carry
signed centred values. Accumulators are reduced only when the next block of
products could overflow.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef inline int64_t _red(int64_t x, int64_t m) nogil:
    x %= m
    return x + m if x < 0 else x


def sparse_mul(const int64_t[::1] a, const int64_t[::1] exps, const int64_t[::1] vals,
               Py_ssize_t n, int64_t m):
    cdef Py_ssize_t t, i, e, nt = exps.shape[0], la = a.shape[0]
    cdef int64_t v, vmax = 1, since = 0, block
    cdef cnp.ndarray[int64_t, ndim=1] res = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] out = res
    for t in range(nt):
        if vals[t] > vmax:
            vmax = vals[t]
        elif -vals[t] > vmax:
            vmax = -vals[t]
    block = (9223372036854775807 - m) // (vmax * (m - 1) if m > 1 else 1)
    if block < 1:
        block = 1
    with nogil:
        for t in range(nt):
            e = exps[t]
            v = vals[t]
            if e > n or v == 0:
                continue
            if since >= block:
                for i in range(n + 1):
                    out[i] = _red(out[i], m)
                since = 0
            for i in range(e, min(n + 1, la + e)):
                out[i] += v * a[i - e]
            since += 1
        for i in range(n + 1):
            out[i] = _red(out[i], m)
    return res


def sparse_div(const int64_t[::1] a, const int64_t[::1] exps, const int64_t[::1] vals,
               Py_ssize_t n, int64_t m, int64_t c0inv):
    """Solve out * (c0 + sum vals q^exps) = a; exps strictly positive and ascending."""
    cdef Py_ssize_t t, i, k, nt = exps.shape[0], la = a.shape[0]
    cdef int64_t acc, v, vmax = 1, block, since
    cdef cnp.ndarray[int64_t, ndim=1] res = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] out = res
    for t in range(nt):
        if vals[t] > vmax:
            vmax = vals[t]
        elif -vals[t] > vmax:
            vmax = -vals[t]
    block = (9223372036854775807 - m) // (vmax * (m - 1) if m > 1 else 1)
    if block < 1:
        block = 1
    with nogil:
        if nt * vmax <= block:
            # no intermediate reduction needed; walk the active prefix of terms
            t = 0
            for i in range(n + 1):
                while t < nt and exps[t] <= i:
                    t += 1
                acc = a[i] if i < la else 0
                for k in range(t):
                    acc -= vals[k] * out[i - exps[k]]
                out[i] = _red(acc, m) * c0inv % m
        else:
            for i in range(n + 1):
                acc = a[i] if i < la else 0
                since = 0
                for k in range(nt):
                    if exps[k] > i:
                        break
                    acc -= vals[k] * out[i - exps[k]]
                    since += 1
                    if since >= block:
                        acc = _red(acc, m)
                        since = 0
                out[i] = _red(acc, m) * c0inv % m
    return res


def dense_mul(const int64_t[::1] a, const int64_t[::1] b, Py_ssize_t n, int64_t m):
    cdef Py_ssize_t i, j, la = a.shape[0], lb = b.shape[0], top
    cdef uint64_t ai, block, since = 0
    cdef uint64_t mm = <uint64_t>m
    cdef cnp.ndarray[uint64_t, ndim=1] acc_arr = np.zeros(n + 1, dtype=np.uint64)
    cdef uint64_t[::1] acc = acc_arr
    block = (18446744073709551615ULL - mm) // ((mm - 1) * (mm - 1) if mm > 1 else 1)
    if block < 1:
        block = 1
    with nogil:
        for i in range(min(la, n + 1)):
            ai = <uint64_t>a[i]
            if ai == 0:
                continue
            if since >= block:
                for j in range(n + 1):
                    acc[j] %= mm
                since = 0
            top = min(lb, n + 1 - i)
            for j in range(top):
                acc[i + j] += ai * <uint64_t>b[j]
            since += 1
        for j in range(n + 1):
            acc[j] %= mm
    return acc_arr.astype(np.int64)


def dense_inv(const int64_t[::1] a, Py_ssize_t n, int64_t m, int64_t c0inv):
    cdef Py_ssize_t i, k, la = a.shape[0]
    cdef uint64_t acc, block, since, mm = <uint64_t>m
    cdef cnp.ndarray[int64_t, ndim=1] res = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] out = res
    block = (18446744073709551615ULL - mm) // ((mm - 1) * (mm - 1) if mm > 1 else 1)
    if block < 1:
        block = 1
    with nogil:
        out[0] = c0inv % m
        for i in range(1, n + 1):
            acc = 0
            since = 0
            for k in range(1, min(i, la - 1) + 1):
                acc += <uint64_t>a[k] * <uint64_t>out[i - k]
                since += 1
                if since >= block:
                    acc %= mm
                    since = 0
            acc %= mm
            out[i] = <int64_t>((mm - acc) % mm) * c0inv % m
    return res
