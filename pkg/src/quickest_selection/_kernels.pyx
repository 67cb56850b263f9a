# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled replication loops.

Each function simulates replications ``start .. start+count-1`` and writes one
integer per replication. Draw order per replication:

stream / blocking   one uniform per observation
shortcut            per selection: gap uniform (redrawn while 0), then value uniform
size-focused        one uniform per observation

A negative entry flags a failed replication (-1 runaway, -2 degenerate
window); the Python wrappers turn those into exceptions.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, floor, log, log1p
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double uniform(uint64_t key, uint64_t j) noexcept nogil:
    return <double>(mix64(key + GOLDEN * j) >> 11) * INV53


cdef inline uint64_t stream_key(uint64_t seed_mix, uint64_t index) noexcept nogil:
    return mix64(seed_mix + GOLDEN * (index + 1))


cdef int64_t stream_one(const double* t, int n, int m, uint64_t key, int64_t cap) noexcept nogil:
    cdef int64_t j = 0
    cdef int blk, k, b
    cdef double last, u, y, um
    for blk in range(m):
        last = 0.0
        k = 0
        while k < n:
            j += 1
            if j > cap:
                return -1
            u = uniform(key, <uint64_t>j)
            um = u * m
            b = <int>floor(um)
            if b != blk:
                continue
            y = um - b
            if y >= last and y <= last + t[n - k] * (1.0 - last):
                last = y
                k += 1
    return j


cdef int64_t shortcut_one(const double* t, int n, uint64_t key) noexcept nogil:
    cdef uint64_t j = 0
    cdef int64_t total = 0
    cdef int k
    cdef double x = 0.0, lam, u
    for k in range(n):
        lam = t[n - k] * (1.0 - x)
        if not lam > 0.0:
            return -2
        j += 1
        u = uniform(key, j)
        while u == 0.0:
            j += 1
            u = uniform(key, j)
        if lam >= 1.0:
            total += 1
        else:
            total += <int64_t>ceil(log(u) / log1p(-lam))
        j += 1
        x = x + uniform(key, j) * lam
    return total


cdef int64_t size_focused_one(const double* u_flat, Py_ssize_t width, int horizon,
                              uint64_t key) noexcept nogil:
    cdef uint64_t j = 0
    cdef int64_t count = 0
    cdef Py_ssize_t ix = 0, iy
    cdef int i
    cdef double x = 0.0, y
    cdef const double* row
    for i in range(horizon, 0, -1):
        j += 1
        y = uniform(key, j)
        if y > x:
            row = u_flat + (i - 1) * width
            iy = <Py_ssize_t>floor(y * (width - 1) + 0.5)
            if 1.0 + row[iy] >= row[ix]:
                count += 1
                x = y
                ix = iy
    return count


def stream_times(const double[::1] t, int n, int m, uint64_t seed, int64_t start,
                 int64_t count, int64_t cap):
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef uint64_t sm = mix64(seed)
    cdef int64_t r
    cdef const double* tp = &t[0]
    with nogil:
        for r in range(count):
            ov[r] = stream_one(tp, n, m, stream_key(sm, <uint64_t>(start + r)), cap)
    return out


def shortcut_times(const double[::1] t, int n, uint64_t seed, int64_t start, int64_t count):
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef uint64_t sm = mix64(seed)
    cdef int64_t r
    cdef const double* tp = &t[0]
    with nogil:
        for r in range(count):
            ov[r] = shortcut_one(tp, n, stream_key(sm, <uint64_t>(start + r)))
    return out


def size_focused_counts(const double[:, ::1] values, int horizon, uint64_t seed,
                        int64_t start, int64_t count):
    cdef cnp.ndarray[int64_t, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef uint64_t sm = mix64(seed)
    cdef int64_t r
    cdef const double* up = &values[0, 0]
    cdef Py_ssize_t width = values.shape[1]
    with nogil:
        for r in range(count):
            ov[r] = size_focused_one(up, width, horizon, stream_key(sm, <uint64_t>(start + r)))
    return out
