# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for characteristic-2 field arithmetic.

Mirrors the API of ``pure.py``; see that module for the encoding and
table conventions.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def gf2_mul(const cnp.int64_t[::1] a not None, const cnp.int64_t[::1] b not None,
            const cnp.int64_t[::1] log not None, const cnp.int64_t[::1] exp not None):
    cdef Py_ssize_t n = a.shape[0]
    out_arr = np.zeros(n, dtype=np.int64)
    cdef cnp.int64_t[::1] out = out_arr
    cdef Py_ssize_t i
    cdef cnp.int64_t x, y
    for i in range(n):
        x = a[i]
        y = b[i]
        if x != 0 and y != 0:
            out[i] = exp[log[x] + log[y]]
    return out_arr


def gf2_matmul(const cnp.int64_t[:, ::1] A not None, const cnp.int64_t[:, ::1] B not None,
               const cnp.int64_t[::1] log not None, const cnp.int64_t[::1] exp not None):
    cdef Py_ssize_t r = A.shape[0], s = A.shape[1], c = B.shape[1]
    out_arr = np.zeros((r, c), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, k
    cdef cnp.int64_t x, la
    for i in range(r):
        for k in range(s):
            x = A[i, k]
            if x == 0:
                continue
            la = log[x]
            for j in range(c):
                if B[k, j] != 0:
                    out[i, j] ^= exp[la + log[B[k, j]]]
    return out_arr


def gf2_conv(const cnp.int64_t[:, ::1] a not None, const cnp.int64_t[:, ::1] b not None,
             const cnp.int64_t[::1] log not None, const cnp.int64_t[::1] exp not None):
    cdef Py_ssize_t nb = a.shape[0], ma = a.shape[1], mb = b.shape[1]
    out_arr = np.zeros((nb, ma + mb - 1), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t t, i, j
    cdef cnp.int64_t x, la
    for t in range(nb):
        for i in range(ma):
            x = a[t, i]
            if x == 0:
                continue
            la = log[x]
            for j in range(mb):
                if b[t, j] != 0:
                    out[t, i + j] ^= exp[la + log[b[t, j]]]
    return out_arr


def gf2_rref(const cnp.int64_t[:, :] M not None,
             const cnp.int64_t[::1] log not None, const cnp.int64_t[::1] exp not None):
    R_arr = np.array(M, dtype=np.int64, copy=True, order="C")
    cdef cnp.int64_t[:, ::1] R = R_arr
    cdef Py_ssize_t rows = R.shape[0], cols = R.shape[1]
    cdef cnp.int64_t qm1 = exp.shape[0] // 2
    cdef Py_ssize_t pr = 0, col, i, j, piv
    cdef cnp.int64_t p, inv, linv, f, lf, tmp
    pivots = []
    for col in range(cols):
        if pr >= rows:
            break
        piv = -1
        for i in range(pr, rows):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != pr:
            for j in range(cols):
                tmp = R[pr, j]
                R[pr, j] = R[piv, j]
                R[piv, j] = tmp
        p = R[pr, col]
        if p != 1:
            linv = qm1 - log[p]
            for j in range(cols):
                if R[pr, j] != 0:
                    R[pr, j] = exp[linv + log[R[pr, j]]]
        for i in range(rows):
            if i == pr:
                continue
            f = R[i, col]
            if f == 0:
                continue
            lf = log[f]
            for j in range(cols):
                if R[pr, j] != 0:
                    R[i, j] ^= exp[lf + log[R[pr, j]]]
        pivots.append(col)
        pr += 1
    return R_arr, pivots
