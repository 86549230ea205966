"""Lifted linear matrix codes: seeded generators, elimination decoding,
Chernoff failure bounds, and the rateless feedback protocol.

The transmitter sends lifted blocks of B @ G; with the channel matrices
recovered from the identity prefixes, decoding succeeds exactly when
G @ blockdiag(H) keeps full row rank, so failure statistics reduce to a
rank event and obey the tail bounds below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import backend
from .channel import ChannelModel, RankPmf
from .errors import DomainError, ShapeError
from .fields import FieldSpec
from .matrix import Mat, solve_linear
from .rank_codes import LiftedCodeword, extract_channel, lift, split_blocks
from .rng import make_rng


class LinearMatrixCode:
    """floor(n s) x n M pseudorandom generator over GF(q), seeded."""

    def __init__(self, field: FieldSpec, T: int, M: int, n: int, s: float, seed: int):
        if n < 1:
            raise DomainError("n must be >= 1")
        if s <= 0:
            raise DomainError("the design rate parameter s must be positive")
        rows = int(math.floor(n * s))
        if rows < 1:
            raise DomainError("floor(n s) must be at least 1")
        if T <= M:
            raise DomainError("lifting needs T > M")
        self.field = field
        self.T = T
        self.M = M
        self.n = n
        self.s = s
        self.rows = rows
        self.seed = seed
        rng = make_rng(seed)
        self.G = Mat(
            field,
            rng.integers(0, field.q, size=(rows, n * M), dtype=np.int64),
        )

    @property
    def rate(self) -> float:
        return (1.0 - self.M / self.T) * self.rows / self.n

    def block(self, i: int) -> Mat:
        return self.G.take_cols(range(i * self.M, (i + 1) * self.M))

    def encode(self, B: Mat) -> LiftedCodeword:
        if B.shape != (self.T - self.M, self.rows):
            raise ShapeError(
                f"message must be {(self.T - self.M, self.rows)}, got {B.shape}"
            )
        codeword = B @ self.G
        return lift(split_blocks(codeword, self.n))

    def assemble(self, h_blocks: Sequence[Mat]) -> Mat:
        """F = [G_1 H_1 | ... | G_n H_n]."""
        if len(h_blocks) != self.n:
            raise ShapeError(f"expected {self.n} channel blocks")
        parts = [self.block(i) @ h for i, h in enumerate(h_blocks)]
        return Mat(self.field, np.hstack([p.a for p in parts]))

    def decode(self, y_blocks: Sequence[Mat]):
        """(status, message): decoded iff G blockdiag(H) has full row rank."""
        hs, ys = extract_channel(y_blocks, self.M)
        f = self.assemble(hs)
        if f.rank() < self.rows:
            return "failed", None
        ytilde = Mat(self.field, np.hstack([b.a for b in ys]))
        sol = solve_linear(f, ytilde)
        assert sol.kind == "unique"
        return "decoded", sol.x


def make_generator(
    field: FieldSpec, T: int, M: int, n: int, s: float, seed: int
) -> LinearMatrixCode:
    return LinearMatrixCode(field, T, M, n, s, seed)


# -- tail machinery ---------------------------------------------------------------


@dataclass(frozen=True)
class ChernoffParams:
    alpha: float
    m: int
    A: float
    B: float
    g: float


def chernoff_params(probs: Sequence[float], alpha: float, m: Optional[int] = None) -> ChernoffParams:
    """g(alpha) = E[(A/B)^((tau - alpha)/m)] < 1 for alpha below the mean."""
    probs = list(probs)
    m = len(probs) - 1 if m is None else m
    mean = sum(r * p for r, p in enumerate(probs))
    if alpha >= mean:
        raise DomainError(f"alpha must be below E[tau] = {mean}, got {alpha}")
    A = sum((alpha - r) * p for r, p in enumerate(probs) if r < alpha)
    B = sum((r - alpha) * p for r, p in enumerate(probs) if r > alpha)
    if A == 0.0:
        return ChernoffParams(alpha, m, 0.0, B, 0.0)
    ratio = A / B
    g = sum(p * ratio ** ((r - alpha) / m) for r, p in enumerate(probs))
    return ChernoffParams(alpha, m, A, B, g)


def chernoff_g(probs: Sequence[float], alpha: float, m: Optional[int] = None) -> float:
    return chernoff_params(probs, alpha, m).g


def tail_bound(probs: Sequence[float], alpha: float, n: int):
    """Bounds on Pr{sum of n iid tau < n alpha}: (chernoff g^n, hoeffding)."""
    par = chernoff_params(probs, alpha)
    mean = sum(r * p for r, p in enumerate(probs))
    hoeffding = math.exp(-2.0 * n * (alpha - mean) ** 2 / par.m**2)
    return par.g**n, hoeffding


@dataclass(frozen=True)
class FailureBound:
    n: int
    s: float
    eps: float
    g: float
    average: float  # bound on the failure of an average generator
    half_of_matrices: float  # twice it: holds for more than half of all G


def failure_bound(
    rank_pmf: RankPmf, n: int, s: float, eps: Optional[float] = None, q: int = 2
) -> FailureBound:
    """q^-floor(n eps)/(q-1) + g(s + eps)^n, and its doubled form."""
    mean = rank_pmf.mean
    if eps is None:
        eps = (mean - s) / 2.0
    if not 0 < s < s + eps < mean:
        raise DomainError(
            f"need 0 < s < s + eps < E[rank], got s={s}, eps={eps}, mean={mean}"
        )
    g = chernoff_g(rank_pmf.probs, s + eps)
    base = q ** (-math.floor(n * eps)) / (q - 1) + g**n
    return FailureBound(n, s, eps, g, base, 2.0 * base)


# -- fast failure-rate Monte Carlo ---------------------------------------------------


def failure_rate_mc(
    model: ChannelModel, code: LinearMatrixCode, trials: int, rng
) -> float:
    """Empirical Pr{rank(G blockdiag(H)) < floor(n s)}, the decoding
    failure event; vectorized over blocks, compiled rank kernel."""
    if model.field != code.field or model.M != code.M:
        raise ShapeError("code and channel disagree")
    if model.field.k != 1:
        return _failure_rate_generic(model, code, trials, rng)
    p = model.field.p
    n, rows, M, N = code.n, code.rows, code.M, model.N
    gb = np.ascontiguousarray(
        code.G.a.reshape(rows, n, M).transpose(1, 0, 2)
    ).astype(np.float64)
    failures = 0
    f_buf = np.empty((rows, n * N), dtype=np.int64)
    for _ in range(trials):
        hs = model.sample_H_batch(rng, n).astype(np.float64)
        parts = np.matmul(gb, hs)  # (n, rows, N), exact in float64
        f_buf[:] = np.mod(parts.transpose(1, 0, 2).reshape(rows, n * N), p)
        if backend.rank(f_buf, model.field) < rows:
            failures += 1
    return failures / trials


def _failure_rate_generic(model, code, trials, rng):
    failures = 0
    for _ in range(trials):
        hs = [Mat(model.field, h) for h in model.sample_H_batch(rng, code.n)]
        if code.assemble(hs).rank() < code.rows:
            failures += 1
    return failures / trials


# -- rateless protocol ------------------------------------------------------------------


class IncrementalRank:
    """Echelon accumulator: feed columns, read off the rank so far."""

    def __init__(self, field: FieldSpec, height: int):
        self.field = field
        self.height = height
        self.pivot_rows: dict[int, np.ndarray] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def add(self, vec: np.ndarray) -> bool:
        """Reduce one length-height vector; True if it increased the rank."""
        f = self.field
        v = np.array(vec, dtype=np.int64)
        for pos in sorted(self.pivot_rows):
            c = int(v[pos])
            if c:
                pivot = self.pivot_rows[pos]
                v = np.array(
                    [f.sub(int(a), f.mul(c, int(b))) for a, b in zip(v, pivot)],
                    dtype=np.int64,
                )
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        lead = int(nz[0])
        inv = f.inv(int(v[lead]))
        v = np.array([f.mul(inv, int(a)) for a in v], dtype=np.int64)
        self.pivot_rows[lead] = v
        return True


@dataclass(frozen=True)
class SessionResult:
    blocks_used: int
    success: bool
    rank_history: tuple
    consistency_ok: bool


def rateless_session(
    model: ChannelModel,
    R: int,
    generator_seed: int,
    max_blocks: int,
    rng,
    message: Optional[Mat] = None,
    check_incremental: bool = False,
    generators: Optional[np.ndarray] = None,
) -> SessionResult:
    """Transmit lifted blocks of B G_i until G^(n) blockdiag(H) reaches
    rank R (one-bit feedback assumed instantaneous), then decode and
    verify the message."""
    if R < 1:
        raise DomainError("R must be >= 1")
    field = model.field
    if generators is None:
        grng = make_rng(generator_seed)
        gs = grng.integers(0, field.q, size=(max_blocks, R, model.M), dtype=np.int64)
    else:
        gs = np.asarray(generators, dtype=np.int64)
        if gs.shape != (max_blocks, R, model.M):
            raise ShapeError("generator series has the wrong shape")
    if message is None:
        message = Mat(
            field,
            rng.integers(0, field.q, size=(model.T - model.M, R), dtype=np.int64),
        )
    tracker = IncrementalRank(field, R)
    f_parts, y_parts = [], []
    history = []
    consistency_ok = True
    for i in range(max_blocks):
        g_i = Mat(field, gs[i])
        h_i = model.sample_H(rng)
        xt_i = message @ g_i
        yt_i = xt_i @ h_i
        f_i = g_i @ h_i
        f_parts.append(f_i.a)
        y_parts.append(yt_i.a)
        for col in range(f_i.cols):
            tracker.add(f_i.a[:, col])
        history.append(tracker.rank)
        if check_incremental:
            batch = Mat(field, np.hstack(f_parts)).rank()
            if batch != tracker.rank:
                consistency_ok = False
        if tracker.rank == R:
            f = Mat(field, np.hstack(f_parts))
            ytilde = Mat(field, np.hstack(y_parts))
            sol = solve_linear(f, ytilde)
            ok = sol.kind == "unique" and sol.x == message
            return SessionResult(i + 1, ok, tuple(history), consistency_ok)
    return SessionResult(max_blocks, False, tuple(history), consistency_ok)


def rateless_success_bound(
    rank_pmf: RankPmf, R: int, n: int, q: int, eps: Optional[float] = None
) -> float:
    """Lower bound on the probability that n blocks suffice, valid for
    n > R / E[rank]."""
    mean = rank_pmf.mean
    if n * mean <= R:
        raise DomainError("bound needs n > R / E[rank]")
    s = R / n
    if eps is None:
        eps = (mean - s) / 2.0
    if not 0 < eps < mean - s:
        raise DomainError("need 0 < eps < E[rank] - R/n")
    g = chernoff_g(rank_pmf.probs, s + eps)
    return 1.0 - 2.0 * (q ** (-math.floor(n * eps)) / (q - 1) + g**n)
