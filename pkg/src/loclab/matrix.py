"""Dense matrices and subspaces over a FieldSpec.

Row-vector convention throughout: channel outputs are y = x @ h, and
``solve_linear`` solves that form.  Subspaces are canonicalized as RREF
row bases so equality is a byte comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import backend
from .errors import NotFullRank, NotInSpan, RankError, ShapeError
from .fields import FieldSpec


class Mat:
    """Immutable dense matrix of field-element indices."""

    __slots__ = ("field", "a")

    def __init__(self, field: FieldSpec, data):
        arr = np.ascontiguousarray(np.asarray(data, dtype=np.int64))
        if arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-D, got {arr.ndim}-D")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ShapeError("entries must be field element indices")
        arr.flags.writeable = False
        self.field = field
        self.a = arr

    # -- constructors --------------------------------------------------------

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Mat":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Mat":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field: FieldSpec, rows) -> "Mat":
        return cls(field, np.asarray(rows, dtype=np.int64))

    @classmethod
    def from_config(cls, field: FieldSpec, cfg: dict) -> "Mat":
        m = cls(field, cfg["data"])
        if m.rows != cfg["rows"] or m.cols != cfg["cols"]:
            raise ShapeError("matrix literal shape does not match its data")
        return m

    def to_config(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "data": self.a.tolist()}

    # -- shape ----------------------------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    # -- algebra ----------------------------------------------------------------

    def _check_same_field(self, other: "Mat"):
        if self.field != other.field:
            raise ShapeError("matrices over different fields")

    def __matmul__(self, other: "Mat") -> "Mat":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return Mat.zeros(self.field, self.rows, other.cols)
        return Mat(self.field, backend.matmul(self.a, other.a, self.field))

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise ShapeError("shape mismatch in addition")
        return Mat(self.field, self._elementwise_add(self.a, other.a))

    def __sub__(self, other: "Mat") -> "Mat":
        return self + (-other)

    def __neg__(self) -> "Mat":
        f = self.field
        if f.p == 2:
            return self
        if f.k == 1:
            return Mat(f, (-self.a) % f.p)
        neg = f.tables().neg
        if neg.size:
            return Mat(f, neg[self.a])
        return Mat(f, np.vectorize(f.neg)(self.a))

    def _elementwise_add(self, x, y):
        f = self.field
        if f.k == 1:
            return (x + y) % f.p
        if f.p == 2:
            return x ^ y
        add = f.tables().add
        if add.size:
            return add[x, y]
        return np.vectorize(f.add)(x, y)

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.field == other.field
            and self.shape == other.shape
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash(self.key())

    def key(self) -> bytes:
        """Stable bytes key (shape + entries) for dict/set use."""
        return self.shape[0].to_bytes(4, "little") + self.a.tobytes()

    # -- views -------------------------------------------------------------------

    @property
    def T(self) -> "Mat":
        return Mat(self.field, self.a.T)

    def take_rows(self, idx) -> "Mat":
        return Mat(self.field, self.a[idx, :])

    def take_cols(self, idx) -> "Mat":
        return Mat(self.field, self.a[:, idx])

    def hstack(self, other: "Mat") -> "Mat":
        self._check_same_field(other)
        return Mat(self.field, np.hstack([self.a, other.a]))

    def vstack(self, other: "Mat") -> "Mat":
        self._check_same_field(other)
        return Mat(self.field, np.vstack([self.a, other.a]))

    # -- rank and echelon ----------------------------------------------------------

    def rank(self) -> int:
        if self.a.size == 0:
            return 0
        return backend.rank(self.a, self.field)

    def rref(self):
        """(rref matrix, rank, pivot column indices)."""
        if self.a.size == 0:
            return self, 0, ()
        red, rank, piv = backend.rref(self.a, self.field)
        return Mat(self.field, red), rank, tuple(int(c) for c in piv)

    def is_zero(self) -> bool:
        return not self.a.any()

    def __repr__(self):
        return f"Mat({self.field!r}, {self.a.tolist()})"


def rref_rank(m: Mat):
    """Reduced echelon form; deterministic first-nonzero pivoting."""
    return m.rref()


@dataclass(frozen=True)
class LinSolve:
    kind: str  # "unique" | "multiple" | "inconsistent"
    x: Optional[Mat] = None


def solve_linear(a: Mat, y: Mat) -> LinSolve:
    """Solve x @ a = y for x (row-vector convention of y = x h).

    Unique iff the system has exactly one solution, in which case
    x @ a == y is verified before returning.
    """
    a._check_same_field(y)
    if a.cols != y.cols:
        raise ShapeError(f"need a.cols == y.cols, got {a.cols} vs {y.cols}")
    # Transpose to the column form a^T x^T = y^T and eliminate.
    at = a.T
    aug = at.hstack(y.T)
    red, rank_aug, piv = aug.rref()
    n = a.rows
    pivots_in_a = [c for c in piv if c < n]
    if len(pivots_in_a) != len(piv):
        return LinSolve("inconsistent")
    if len(pivots_in_a) < n:
        return LinSolve("multiple")
    # unique: reduced block left of the augmentation is I_n on top rows
    xt = red.a[:n, n:]
    x = Mat(a.field, xt.T)
    assert (x @ a) == y
    return LinSolve("unique", x)


def inverse(m: Mat) -> Mat:
    if m.rows != m.cols:
        raise ShapeError("inverse of a non-square matrix")
    aug = m.hstack(Mat.identity(m.field, m.rows))
    red, _, piv = aug.rref()
    if sum(1 for c in piv if c < m.rows) != m.rows:
        raise NotFullRank("matrix is singular")
    return Mat(m.field, red.a[:, m.rows:])


def quotient(a: Mat, b: Mat) -> Mat:
    """The unique c with a = b @ c, for b of full column rank whose column
    space contains the column space of a."""
    a._check_same_field(b)
    if a.rows != b.rows:
        raise ShapeError("a and b must have the same number of rows")
    r = b.cols
    aug = b.hstack(a)
    red, rank, piv = aug.rref()
    if len([c for c in piv if c < r]) != r:
        raise NotFullRank("b is rank deficient")
    if any(c >= r for c in piv):
        raise NotInSpan("columns of a leave the column space of b")
    return Mat(a.field, red.a[:r, r:])


def full_rank_decompose(m: Mat):
    """m = b @ d with b full column rank and d full row rank (rank factors).

    Rank 0 yields empty factors whose product is the zero matrix.
    """
    red, rank, piv = m.rref()
    b = m.take_cols(list(piv))
    d = Mat(m.field, red.a[:rank, :])
    return b, d


def _complete_to_basis(b: Mat) -> Mat:
    """Append standard basis columns to reach an invertible square matrix."""
    field = b.field
    t = b.rows
    cur = b
    rank = cur.rank()
    for i in range(t):
        if rank == t:
            break
        e = np.zeros((t, 1), dtype=np.int64)
        e[i, 0] = 1
        cand = cur.hstack(Mat(field, e))
        r2 = cand.rank()
        if r2 > rank:
            cur = cand
            rank = r2
    return cur


def find_row_space_transform(x: Mat, x2: Mat) -> Optional[Mat]:
    """Invertible phi with phi @ x == x2, which exists iff the two row
    spaces coincide; None otherwise."""
    x._check_same_field(x2)
    if x.shape != x2.shape:
        raise ShapeError("matrices must have the same shape")
    red1, r1, piv1 = x.rref()
    red2, r2, piv2 = x2.rref()
    if r1 != r2 or not np.array_equal(red1.a[:r1], red2.a[:r2]):
        return None
    b1 = x.take_cols(list(piv1))
    b2 = x2.take_cols(list(piv2))
    s1 = _complete_to_basis(b1)
    s2 = _complete_to_basis(b2)
    phi = s2 @ inverse(s1)
    assert (phi @ x) == x2
    return phi


def sample_matrix(
    field: FieldSpec,
    rows: int,
    cols: int,
    rng,
    kind: str = "purely_random",
    rank: Optional[int] = None,
) -> Mat:
    """Sample a matrix: iid-uniform entries, uniform over full-rank
    matrices (row-by-row rejection), or uniform over a rank class
    (full-rank pair product, which hits each rank-r matrix the same
    number of times)."""
    if kind == "purely_random":
        return Mat(field, rng.integers(0, field.q, size=(rows, cols), dtype=np.int64))
    if kind == "full_rank":
        return _sample_full_rank(field, rows, cols, rng)
    if kind == "rank_exact":
        if rank is None or not 0 <= rank <= min(rows, cols):
            raise RankError(f"rank {rank} infeasible for {rows}x{cols}")
        if rank == 0:
            return Mat.zeros(field, rows, cols)
        b = _sample_full_rank(field, rows, rank, rng)
        c = _sample_full_rank(field, rank, cols, rng)
        return b @ c
    raise RankError(f"unknown sampling kind {kind!r}")


def _sample_full_rank(field: FieldSpec, rows: int, cols: int, rng) -> Mat:
    if rows == 0 or cols == 0:
        return Mat.zeros(field, rows, cols)
    if rows > cols:
        return _sample_full_rank(field, cols, rows, rng).T
    # rows <= cols: draw rows one by one, rejecting rows inside the span
    # accumulated so far; acceptance odds are at least 1 - q^(rows-1-cols).
    out = np.zeros((rows, cols), dtype=np.int64)
    for i in range(rows):
        while True:
            out[i] = rng.integers(0, field.q, size=cols, dtype=np.int64)
            if backend.rank(out[: i + 1], field) == i + 1:
                break
    return Mat(field, out)


def all_matrices(field: FieldSpec, rows: int, cols: int) -> Iterator[Mat]:
    """Every matrix of the given shape, in lexicographic entry order."""
    for combo in itertools.product(range(field.q), repeat=rows * cols):
        yield Mat(field, np.array(combo, dtype=np.int64).reshape(rows, cols))


class Subspace:
    """Subspace of F^t canonicalized by its RREF row basis."""

    __slots__ = ("field", "ambient_dim", "basis")

    def __init__(self, field: FieldSpec, ambient_dim: int, basis: Mat):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis  # dim x ambient, already canonical RREF

    @classmethod
    def from_row_span(cls, m: Mat) -> "Subspace":
        red, rank, _ = m.rref()
        return cls(m.field, m.cols, Mat(m.field, red.a[:rank, :]))

    @classmethod
    def from_col_span(cls, m: Mat) -> "Subspace":
        return cls.from_row_span(m.T)

    @classmethod
    def zero(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Mat.zeros(field, 0, ambient_dim))

    @classmethod
    def full(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Mat.identity(field, ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains(self, other: "Subspace") -> bool:
        if other.dim == 0:
            return True
        stacked = self.basis.vstack(other.basis)
        return stacked.rank() == self.dim

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis.key()))

    def key(self) -> bytes:
        return self.ambient_dim.to_bytes(4, "little") + self.basis.key()

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def enumerate_subspaces(field: FieldSpec, ambient: int, dim: int) -> Iterator[Subspace]:
    """All dim-dimensional subspaces of F^ambient via canonical RREF bases."""
    if dim == 0:
        yield Subspace.zero(field, ambient)
        return
    for piv in itertools.combinations(range(ambient), dim):
        free_pos = [
            (i, j)
            for i in range(dim)
            for j in range(ambient)
            if j > piv[i] and j not in piv
        ]
        for values in itertools.product(range(field.q), repeat=len(free_pos)):
            basis = np.zeros((dim, ambient), dtype=np.int64)
            for i, c in enumerate(piv):
                basis[i, c] = 1
            for (i, j), v in zip(free_pos, values):
                basis[i, j] = v
            yield Subspace(field, ambient, Mat(field, basis))


def enumerate_all_subspaces(field: FieldSpec, ambient: int, max_dim: Optional[int] = None):
    hi = ambient if max_dim is None else max_dim
    for d in range(hi + 1):
        yield from enumerate_subspaces(field, ambient, d)
