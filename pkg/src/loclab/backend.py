"""Kernel selection: compiled extension core with pure-Python fallback.

The compiled module is preferred when importable; set ``LOCLAB_PURE=1``
to force the fallback (the test suite runs both).  All functions take and
return row-major int64 index grids.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels
from .fields import KIND_CHAR2, KIND_PRIME, KIND_TABLED

if os.environ.get("LOCLAB_PURE"):
    _ext = None
else:
    try:
        from . import _ext  # type: ignore[attr-defined]
    except ImportError:
        _ext = None

COMPILED = _ext is not None


def backend_name() -> str:
    return "compiled" if COMPILED else "pure-python"


def matmul(a: np.ndarray, b: np.ndarray, field) -> np.ndarray:
    tab = field.tables()
    if tab.kind == KIND_PRIME:
        # numpy is already a compiled kernel for the prime-field product
        return _pykernels._matmul_prime(a, b, tab.p)
    if COMPILED and tab.kind in (KIND_CHAR2, KIND_TABLED):
        return _ext.matmul_lut(
            np.ascontiguousarray(a), np.ascontiguousarray(b),
            tab.kind, tab.q, tab.exp, tab.log, tab.add,
        )
    return _pykernels.matmul(a, b, field)


_P_LIMIT = 1 << 31  # int64 products a*b with a, b < p stay exact below this


def rref(a: np.ndarray, field):
    """Reduced row echelon form -> (rref, rank, pivot columns)."""
    tab = field.tables()
    if COMPILED:
        if field.q == 2:
            return _ext.rref2(np.ascontiguousarray(a))
        if tab.kind == KIND_PRIME and tab.p < _P_LIMIT or tab.kind in (
            KIND_CHAR2, KIND_TABLED
        ):
            return _ext.rref_general(
                np.ascontiguousarray(a), tab.kind, tab.p, tab.q,
                tab.exp, tab.log, tab.add, tab.neg, True,
            )
    return _pykernels.rref(a, field)


def rank(a: np.ndarray, field) -> int:
    tab = field.tables()
    if COMPILED:
        if field.q == 2:
            return _ext.rank2(np.ascontiguousarray(a))
        if tab.kind == KIND_PRIME and tab.p < _P_LIMIT or tab.kind in (
            KIND_CHAR2, KIND_TABLED
        ):
            return _ext.rref_general(
                np.ascontiguousarray(a), tab.kind, tab.p, tab.q,
                tab.exp, tab.log, tab.add, tab.neg, False,
            )[1]
    return _pykernels.rank(a, field)
