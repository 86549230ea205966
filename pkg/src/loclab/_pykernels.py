"""Pure-Python/numpy matrix kernels over GF(q).

Fallback implementations with the same contract as the compiled core in
``_ext``: row-major int64 index grids in, deterministic first-nonzero
pivoting (lowest column index first).  GF(2) work runs on Python-int
bitsets; other fields use vectorized numpy row operations.
"""

from __future__ import annotations

import numpy as np

from .fields import KIND_CHAR2, KIND_PRIME, KIND_TABLED


# -- GF(2) bitset helpers ----------------------------------------------------


def _rows_to_bits(a: np.ndarray) -> list[int]:
    rows = []
    for i in range(a.shape[0]):
        v = 0
        for j, e in enumerate(a[i]):
            if e:
                v |= 1 << j
        rows.append(v)
    return rows


def _bits_to_rows(bits, rows, cols) -> np.ndarray:
    out = np.zeros((rows, cols), dtype=np.int64)
    for i, v in enumerate(bits):
        j = 0
        while v:
            if v & 1:
                out[i, j] = 1
            v >>= 1
            j += 1
    return out


def _rref_q2(a: np.ndarray):
    rows, cols = a.shape
    work = _rows_to_bits(a)
    pivots = []
    r = 0
    for c in range(cols):
        mask = 1 << c
        pivot = next((i for i in range(r, rows) if work[i] & mask), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        wr = work[r]
        for i in range(rows):
            if i != r and work[i] & mask:
                work[i] ^= wr
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return _bits_to_rows(work, rows, cols), r, np.array(pivots, dtype=np.int64)


def _rank_q2(a: np.ndarray) -> int:
    rows, cols = a.shape
    work = _rows_to_bits(a)
    r = 0
    for c in range(cols):
        mask = 1 << c
        pivot = next((i for i in range(r, rows) if work[i] & mask), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        wr = work[r]
        for i in range(r + 1, rows):
            if work[i] & mask:
                work[i] ^= wr
        r += 1
        if r == rows:
            break
    return r


# -- vectorized LUT arithmetic ------------------------------------------------


def _lut_mul_vec(c: int, vec: np.ndarray, tab) -> np.ndarray:
    """c * vec elementwise via log/antilog tables."""
    if c == 0:
        return np.zeros_like(vec)
    out = np.zeros_like(vec)
    nz = vec != 0
    if nz.any():
        idx = (int(tab.log[c]) + tab.log[vec[nz]]) % (tab.q - 1)
        out[nz] = tab.exp[idx]
    return out


def _vec_sub(x: np.ndarray, y: np.ndarray, tab) -> np.ndarray:
    if tab.kind == KIND_CHAR2:
        return x ^ y
    return tab.add[x, tab.neg[y]]


def _rref_lut(a: np.ndarray, tab):
    m = a.copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        lead = int(m[r, c])
        if lead != 1:
            m[r] = _lut_mul_vec(int(tab.inv[lead]), m[r], tab)
        rows_nz = np.nonzero(m[:, c])[0]
        for i in rows_nz:
            if i == r:
                continue
            m[i] = _vec_sub(m[i], _lut_mul_vec(int(m[i, c]), m[r], tab), tab)
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, r, np.array(pivots, dtype=np.int64)


def _rref_prime(a: np.ndarray, p: int):
    m = a.copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            m[[r, pr]] = m[[pr, r]]
        lead = int(m[r, c])
        if lead != 1:
            m[r] = (m[r] * pow(lead, p - 2, p)) % p
        rows_nz = np.nonzero(m[:, c])[0]
        rows_nz = rows_nz[rows_nz != r]
        if rows_nz.size:
            m[rows_nz] = (m[rows_nz] - np.outer(m[rows_nz, c], m[r])) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, r, np.array(pivots, dtype=np.int64)


def _rref_generic(a: np.ndarray, field):
    m = a.copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i, c]), None)
        if pivot is None:
            continue
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        lead = int(m[r, c])
        if lead != 1:
            il = field.inv(lead)
            m[r] = [field.mul(il, int(v)) for v in m[r]]
        for i in range(rows):
            f = int(m[i, c])
            if i == r or f == 0:
                continue
            m[i] = [
                field.sub(int(x), field.mul(f, int(y)))
                for x, y in zip(m[i], m[r])
            ]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, r, np.array(pivots, dtype=np.int64)


# -- public kernel API ---------------------------------------------------------


def rref(a: np.ndarray, field):
    tab = field.tables()
    if field.q == 2:
        return _rref_q2(a)
    if tab.kind == KIND_PRIME and tab.p < (1 << 31):
        return _rref_prime(a, tab.p)
    if tab.kind in (KIND_CHAR2, KIND_TABLED):
        return _rref_lut(a, tab)
    return _rref_generic(a, field)


def rank(a: np.ndarray, field) -> int:
    if field.q == 2:
        return _rank_q2(a)
    return rref(a, field)[1]


def matmul(a: np.ndarray, b: np.ndarray, field) -> np.ndarray:
    tab = field.tables()
    if tab.kind == KIND_PRIME:
        return _matmul_prime(a, b, tab.p)
    if tab.kind in (KIND_CHAR2, KIND_TABLED):
        out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
        for k in range(a.shape[1]):
            col = a[:, k]
            row = b[k, :]
            nzc = col != 0
            nzr = row != 0
            if not nzc.any() or not nzr.any():
                continue
            prod = np.zeros_like(out)
            idx = (tab.log[col[nzc], None] + tab.log[None, row[nzr]]) % (tab.q - 1)
            prod[np.ix_(nzc, nzr)] = tab.exp[idx]
            if tab.kind == KIND_CHAR2:
                out ^= prod
            else:
                out = tab.add[out, prod]
        return out
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0
            for k in range(a.shape[1]):
                acc = field.add(acc, field.mul(int(a[i, k]), int(b[k, j])))
            out[i, j] = acc
    return out


def _matmul_prime(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    # Exact in float64 as long as every dot product stays below 2**53.
    inner = a.shape[1]
    if inner * (p - 1) ** 2 < (1 << 53):
        c = a.astype(np.float64) @ b.astype(np.float64)
        return np.mod(c, p).astype(np.int64)
    return (a.astype(object) @ b.astype(object) % p).astype(np.int64)
