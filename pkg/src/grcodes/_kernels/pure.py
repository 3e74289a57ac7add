"""Numpy fallback kernels for characteristic-2 field arithmetic.

Element encoding: an element of GF(2^w) is an integer in [0, 2^w) whose
bits are the polynomial coefficients.  Addition is XOR and is done by the
callers directly; these kernels cover multiplication-like operations that
need the discrete log tables.

Tables: ``log`` has length q with log[0] unused (guarded by masks), and
``exp`` has length 2(q-1) so that exp[log a + log b] never needs a modular
reduction.
"""

import numpy as np

NAME = "pure"


def gf2_mul(a, b, log, exp):
    """Elementwise product of two equal-shape int64 arrays."""
    out = np.zeros(a.shape, dtype=np.int64)
    nz = (a != 0) & (b != 0)
    out[nz] = exp[log[a[nz]] + log[b[nz]]]
    return out


def gf2_matmul(A, B, log, exp):
    """Matrix product (r,s)x(s,c) over GF(2^w)."""
    r, s = A.shape
    c = B.shape[1]
    out = np.zeros((r, c), dtype=np.int64)
    for i in range(s):
        col = A[:, i]
        row = B[i]
        nz_col = col != 0
        if not nz_col.any():
            continue
        term = np.zeros((r, c), dtype=np.int64)
        nz = np.outer(nz_col, row != 0)
        term[nz] = exp[(log[col[:, None]] + log[row[None, :]])[nz]]
        out ^= term
    return out


def gf2_conv(a, b, log, exp):
    """Batched polynomial product along the last axis: (B,ma),(B,mb)->(B,ma+mb-1)."""
    nb, ma = a.shape
    mb = b.shape[1]
    out = np.zeros((nb, ma + mb - 1), dtype=np.int64)
    for i in range(ma):
        coeff = a[:, i : i + 1]
        out[:, i : i + mb] ^= gf2_mul(np.broadcast_to(coeff, (nb, mb)).copy(), b, log, exp)
    return out


def gf2_rref(M, log, exp):
    """Reduced row echelon form over GF(2^w); returns (R, pivot column list)."""
    R = M.astype(np.int64, copy=True)
    rows, cols = R.shape
    qm1 = len(exp) // 2
    pivots = []
    pr = 0
    for col in range(cols):
        if pr >= rows:
            break
        sub = R[pr:, col]
        nz = np.nonzero(sub)[0]
        if len(nz) == 0:
            continue
        piv = pr + nz[0]
        if piv != pr:
            R[[pr, piv]] = R[[piv, pr]]
        p = R[pr, col]
        if p != 1:
            inv = exp[qm1 - log[p]]
            R[pr] = gf2_mul(R[pr], np.full(cols, inv, dtype=np.int64), log, exp)
        targets = np.nonzero(R[:, col])[0]
        targets = targets[targets != pr]
        if len(targets):
            factors = R[targets, col]
            upd = gf2_mul(
                np.broadcast_to(factors[:, None], (len(targets), cols)).copy(),
                np.broadcast_to(R[pr][None, :], (len(targets), cols)).copy(),
                log,
                exp,
            )
            R[targets] ^= upd
        pivots.append(col)
        pr += 1
    return R, pivots
