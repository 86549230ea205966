# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled matrix kernels over GF(q).

Hot inner loops behind the Monte Carlo simulations: Gaussian elimination
and table-driven matrix products on int64 index grids.  GF(2) work runs
on 64-bit packed rows.  The pure-Python fallback in ``_pykernels`` has
the identical contract; ``backend`` picks one at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KIND_PRIME = 0
KIND_CHAR2 = 1
KIND_TABLED = 2


cdef inline long _inv_prime(long a, long p):
    cdef long e = p - 2
    cdef long out = 1
    cdef long base = a % p
    while e:
        if e & 1:
            out = (out * base) % p
        base = (base * base) % p
        e >>= 1
    return out


# ---------------------------------------------------------------------------
# GF(2), rows packed into uint64 words (bit j of word j>>6 = column j)
# ---------------------------------------------------------------------------


cdef void _pack2(const long[:, ::1] a, unsigned long long[:, ::1] w):
    cdef Py_ssize_t i, j
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j]:
                w[i, j >> 6] |= (<unsigned long long>1) << (j & 63)


def rank2(const long[:, ::1] a):
    """Rank over GF(2) via packed forward elimination."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t words = (cols + 63) >> 6
    wbuf = np.zeros((rows, words), dtype=np.uint64)
    cdef unsigned long long[:, ::1] w = wbuf
    _pack2(a, w)
    cdef Py_ssize_t r = 0, c, i, k, wi, piv
    cdef unsigned long long bit, tmp
    for c in range(cols):
        wi = c >> 6
        bit = (<unsigned long long>1) << (c & 63)
        piv = -1
        for i in range(r, rows):
            if w[i, wi] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(wi, words):
                tmp = w[r, k]
                w[r, k] = w[piv, k]
                w[piv, k] = tmp
        for i in range(r + 1, rows):
            if w[i, wi] & bit:
                for k in range(wi, words):
                    w[i, k] ^= w[r, k]
        r += 1
        if r == rows:
            break
    return r


def rref2(const long[:, ::1] a):
    """Reduced row-echelon form over GF(2); returns (rref, rank, pivots)."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t words = (cols + 63) >> 6
    wbuf = np.zeros((rows, words), dtype=np.uint64)
    cdef unsigned long long[:, ::1] w = wbuf
    _pack2(a, w)
    piv_buf = np.zeros(min(rows, cols), dtype=np.int64)
    cdef long[::1] pivots = piv_buf
    cdef Py_ssize_t r = 0, c, i, k, wi, piv
    cdef unsigned long long bit, tmp
    for c in range(cols):
        wi = c >> 6
        bit = (<unsigned long long>1) << (c & 63)
        piv = -1
        for i in range(r, rows):
            if w[i, wi] & bit:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(wi, words):
                tmp = w[r, k]
                w[r, k] = w[piv, k]
                w[piv, k] = tmp
        for i in range(rows):
            if i != r and (w[i, wi] & bit):
                for k in range(wi, words):
                    w[i, k] ^= w[r, k]
        pivots[r] = c
        r += 1
        if r == rows:
            break
    out = np.zeros((rows, cols), dtype=np.int64)
    cdef long[:, ::1] o = out
    for i in range(rows):
        for c in range(cols):
            if w[i, c >> 6] & ((<unsigned long long>1) << (c & 63)):
                o[i, c] = 1
    return out, r, piv_buf[:r].copy()


# ---------------------------------------------------------------------------
# generic int64 grids (prime / char-2 LUT / tabled LUT)
# ---------------------------------------------------------------------------


cdef inline long _mul(long a, long b, int kind, long p, long q,
                      long[::1] exp, long[::1] log):
    if kind == 0:
        return (a * b) % p
    if a == 0 or b == 0:
        return 0
    return exp[(log[a] + log[b]) % (q - 1)]


cdef inline long _sub(long a, long b, int kind, long p,
                      long[:, ::1] add, long[::1] neg):
    if kind == 0:
        return (a - b) % p if (a - b) % p >= 0 else ((a - b) % p + p) % p
    if kind == 1:
        return a ^ b
    return add[a, neg[b]]


cdef inline long _inv(long a, int kind, long p, long q,
                      long[::1] exp, long[::1] log):
    if kind == 0:
        return _inv_prime(a, p)
    return exp[(q - 1 - log[a]) % (q - 1)]


def rref_general(const long[:, ::1] a, int kind, long p, long q,
                 long[::1] exp, long[::1] log,
                 long[:, ::1] add, long[::1] neg, bint reduce_full):
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    out = np.array(a, dtype=np.int64)
    cdef long[:, ::1] m = out
    piv_buf = np.zeros(min(rows, cols), dtype=np.int64)
    cdef long[::1] pivots = piv_buf
    cdef Py_ssize_t r = 0, c, i, k, piv, start
    cdef long lead, il, f, tmp
    for c in range(cols):
        piv = -1
        for i in range(r, rows):
            if m[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(cols):
                tmp = m[r, k]
                m[r, k] = m[piv, k]
                m[piv, k] = tmp
        lead = m[r, c]
        if lead != 1:
            il = _inv(lead, kind, p, q, exp, log)
            for k in range(cols):
                m[r, k] = _mul(il, m[r, k], kind, p, q, exp, log)
        start = 0 if reduce_full else r + 1
        for i in range(start, rows):
            if i == r:
                continue
            f = m[i, c]
            if f == 0:
                continue
            for k in range(cols):
                m[i, k] = _sub(m[i, k],
                               _mul(f, m[r, k], kind, p, q, exp, log),
                               kind, p, add, neg)
        pivots[r] = c
        r += 1
        if r == rows:
            break
    return out, r, piv_buf[:r].copy()


def matmul_lut(const long[:, ::1] a, const long[:, ::1] b, int kind, long q,
               long[::1] exp, long[::1] log, long[:, ::1] add):
    """Matrix product for extension fields via log/antilog tables."""
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t inner = a.shape[1]
    cdef Py_ssize_t cols = b.shape[1]
    out = np.zeros((rows, cols), dtype=np.int64)
    cdef long[:, ::1] o = out
    cdef Py_ssize_t i, j, k
    cdef long acc, x, prod
    for i in range(rows):
        for j in range(cols):
            acc = 0
            for k in range(inner):
                x = a[i, k]
                if x == 0 or b[k, j] == 0:
                    continue
                prod = exp[(log[x] + log[b[k, j]]) % (q - 1)]
                if kind == 1:
                    acc ^= prod
                else:
                    acc = add[acc, prod]
            o[i, j] = acc
    return out
