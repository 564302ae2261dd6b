# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels. Same contract as ``_pykernels``; sums are exactly rounded."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

NAME = "cython"

# partial buffer size; doubles need at most ~40 non-overlapping partials
cdef enum:
    NPART = 64


cdef inline int _grow(double* p, int m, double x) noexcept nogil:
    cdef int i = 0, j
    cdef double y, t, hi, lo
    for j in range(m):
        y = p[j]
        if fabs(x) < fabs(y):
            t = x
            x = y
            y = t
        hi = x + y
        lo = y - (hi - x)
        if lo != 0.0:
            p[i] = lo
            i += 1
        x = hi
    p[i] = x
    return i + 1


cdef inline double _finish(double* p, int m) noexcept nogil:
    # final rounding, mirrors CPython's math.fsum
    cdef double hi = 0.0, lo = 0.0, x, y, yr
    if m == 0:
        return 0.0
    m -= 1
    hi = p[m]
    while m > 0:
        x = hi
        m -= 1
        y = p[m]
        hi = x + y
        yr = hi - x
        lo = y - yr
        if lo != 0.0:
            break
    if m > 0 and ((lo < 0.0 and p[m - 1] < 0.0) or (lo > 0.0 and p[m - 1] > 0.0)):
        y = lo * 2.0
        x = hi + y
        yr = x - hi
        if y == yr:
            hi = x
    return hi


def normalize_rows(raw):
    cdef const double[:, ::1] r = np.ascontiguousarray(raw, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], k = r.shape[1], i, a
    out = np.zeros((n, k))
    valid = np.zeros(n, dtype=np.uint8)
    cdef double[:, ::1] w = out
    cdef unsigned char[::1] v = valid
    cdef double part[NPART]
    cdef int m
    cdef double total
    with nogil:
        for i in range(n):
            m = 0
            for a in range(k):
                m = _grow(part, m, r[i, a])
            total = _finish(part, m)
            if total > 0.0:
                v[i] = 1
                for a in range(k):
                    w[i, a] = r[i, a] / total
    return out, valid.astype(bool)


def cooccurrence(positive):
    cdef const unsigned char[:, ::1] pos = np.ascontiguousarray(positive, dtype=np.uint8)
    cdef Py_ssize_t n = pos.shape[0], k = pos.shape[1], i, a, b, c, nz
    out = np.zeros((k, k), dtype=np.int64)
    cdef long long[:, ::1] o = out
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(max(k, 1) * sizeof(Py_ssize_t))
    try:
        with nogil:
            for i in range(n):
                nz = 0
                for a in range(k):
                    if pos[i, a]:
                        idx[nz] = a
                        nz += 1
                for b in range(nz):
                    for c in range(nz):
                        o[idx[b], idx[c]] += 1
    finally:
        free(idx)
    return out


def quadratic_entropy(weights, dist):
    cdef const double[:, ::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(dist, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0], k = w.shape[1], i, a, b, nz
    out = np.zeros(n)
    cdef double[::1] o = out
    cdef Py_ssize_t* idx = <Py_ssize_t*> malloc(max(k, 1) * sizeof(Py_ssize_t))
    cdef double part[NPART]
    cdef int m
    try:
        with nogil:
            for i in range(n):
                nz = 0
                for a in range(k):
                    if w[i, a] != 0.0:
                        idx[nz] = a
                        nz += 1
                if nz < 2:
                    continue
                m = 0
                for a in range(nz):
                    for b in range(nz):
                        m = _grow(part, m, (w[i, idx[a]] * w[i, idx[b]]) * d[idx[a], idx[b]])
                o[i] = _finish(part, m)
    finally:
        free(idx)
    return out


def weighted_mass(positive, weights, scores):
    cdef const unsigned char[:, ::1] pos = np.ascontiguousarray(positive, dtype=np.uint8)
    cdef const double[::1] c = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[:, ::1] sc = np.ascontiguousarray(scores, dtype=np.float64)
    cdef Py_ssize_t n = pos.shape[0], k = pos.shape[1], s = sc.shape[1]
    cdef Py_ssize_t i, a, j, cell
    cdef double x
    out = np.zeros((k, s))
    cdef double[:, ::1] o = out
    cdef double* parts = <double*> malloc(max(k * s, 1) * NPART * sizeof(double))
    cdef int* counts = <int*> malloc(max(k * s, 1) * sizeof(int))
    try:
        with nogil:
            for cell in range(k * s):
                counts[cell] = 0
            for i in range(n):
                for a in range(k):
                    if not pos[i, a]:
                        continue
                    for j in range(s):
                        if sc[i, j] > 0.0:
                            x = c[i] * sc[i, j]
                            cell = a * s + j
                            counts[cell] = _grow(parts + cell * NPART, counts[cell], x)
            for a in range(k):
                for j in range(s):
                    cell = a * s + j
                    o[a, j] = _finish(parts + cell * NPART, counts[cell])
    finally:
        free(parts)
        free(counts)
    return out
