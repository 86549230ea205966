"""Rank-metric (Gabidulin) codes, lifting, and known-H decoding.

Codewords are t x m matrices over GF(q) obtained by evaluating a
linearized polynomial sum_i u_i z^(q^i) at m points of GF(q^t) that are
linearly independent over GF(q), then expanding each value in the
polynomial basis.  Construction requires t >= m and meets the rank
Singleton bound with equality (distance m - k + 1).

Decoding uses the channel knowledge recovered from the identity prefix:
the codeword constraint is GF(q)-linear, so codeword @ H = received is
one joint linear system in the message coordinates.  Generic elimination
costs O((t k)^3)-ish field operations, above the specialized rank-metric
decoders, but with known H the two agree wherever correctness is
guaranteed and the system stays tiny for the regimes simulated here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .channel import ChannelModel, RankPmf
from .errors import (
    DomainError,
    InternalError,
    NotConstructible,
    ShapeError,
)
from .fields import ExtensionField, FieldSpec
from .matrix import Mat, solve_linear


def rank_distance(a: Mat, b: Mat) -> int:
    """d(a, b) = rank(a - b); a metric on matrices of one shape."""
    if a.shape != b.shape or a.field != b.field:
        raise ShapeError("rank distance needs matrices of identical shape")
    return (a - b).rank()


class GabidulinCode:
    """MRD code with t rows, m_cols columns, message dimension k over
    GF(q^t); designed minimum rank distance m_cols - k + 1."""

    def __init__(
        self,
        base_field: FieldSpec,
        t: int,
        m_cols: int,
        k: int,
        eval_points: Optional[Sequence] = None,
        ext_modulus: Optional[Sequence[int]] = None,
    ):
        if t < m_cols:
            raise NotConstructible(
                f"Gabidulin needs at least as many rows as columns, got "
                f"t={t} < m_cols={m_cols}"
            )
        if not 1 <= k <= m_cols:
            raise DomainError(f"message dimension k={k} outside 1..{m_cols}")
        self.base_field = base_field
        self.t = t
        self.m_cols = m_cols
        self.k = k
        self.ext = ExtensionField(base_field, t, ext_modulus)
        if eval_points is None:
            # polynomial basis 1, z, z^2, ...
            pts = []
            for j in range(m_cols):
                coeffs = [0] * t
                coeffs[j] = 1
                pts.append(tuple(coeffs))
            self.eval_points = pts
        else:
            self.eval_points = [
                self.ext.from_index(p) if isinstance(p, int) else tuple(p)
                for p in eval_points
            ]
            if len(self.eval_points) != m_cols:
                raise DomainError("need exactly m_cols evaluation points")
            coords = Mat(base_field, np.array(self.eval_points, dtype=np.int64).T)
            if coords.rank() != m_cols:
                raise DomainError(
                    "evaluation points must be linearly independent over GF(q)"
                )
        # g_j^(q^i) for i < k
        self._powers = [
            [self.ext.frobenius(g, i) for g in self.eval_points]
            for i in range(k)
        ]
        self._basis_cache = None

    @property
    def designed_distance(self) -> int:
        return self.m_cols - self.k + 1

    @property
    def log2_size(self) -> float:
        return self.t * self.k * math.log2(self.base_field.q)

    def message_from_indices(self, idxs: Sequence[int]):
        return [self.ext.from_index(i) for i in idxs]

    def encode(self, message) -> Mat:
        """message: k symbols of GF(q^t) (tuples or packed indices)."""
        msg = [
            self.ext.from_index(u) if isinstance(u, (int, np.integer)) else tuple(u)
            for u in message
        ]
        if len(msg) != self.k:
            raise ShapeError(f"message must have {self.k} symbols")
        cols = []
        for j in range(self.m_cols):
            acc = self.ext.zero()
            for i, u in enumerate(msg):
                acc = self.ext.add(acc, self.ext.mul(u, self._powers[i][j]))
            cols.append(acc)
        grid = np.array(cols, dtype=np.int64).T  # coefficient rows, point cols
        return Mat(self.base_field, grid)

    def messages(self) -> Iterator[list]:
        """Every message, for exhaustive checks on small codes."""
        for combo in itertools.product(range(self.ext.q), repeat=self.k):
            yield [self.ext.from_index(i) for i in combo]

    def codewords(self) -> Iterator[Mat]:
        for msg in self.messages():
            yield self.encode(msg)

    def message_basis(self):
        """GF(q)-basis of the message space: unit coefficient vectors."""
        if self._basis_cache is not None:
            return self._basis_cache
        out = []
        for i in range(self.k):
            for d in range(self.t):
                msg = [self.ext.zero()] * self.k
                coeffs = [0] * self.t
                coeffs[d] = 1
                msg[i] = tuple(coeffs)
                out.append((msg, self.encode(msg)))
        self._basis_cache = out
        return out

    def message_from_coordinates(self, coords: Sequence[int]):
        """Rebuild the message from its GF(q) coordinates in the
        message_basis ordering: symbol i gets coefficients i*t..i*t+t-1,
        which are exactly its polynomial-basis entries."""
        return [
            tuple(int(c) for c in coords[i * self.t:(i + 1) * self.t])
            for i in range(self.k)
        ]


def min_rank_distance_exhaustive(code: GabidulinCode) -> int:
    """Minimum pairwise rank distance by full enumeration."""
    words = list(code.codewords())
    best = None
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            d = rank_distance(words[i], words[j])
            best = d if best is None or d < best else best
    return best


# -- lifting --------------------------------------------------------------------


@dataclass(frozen=True)
class LiftedCodeword:
    """n blocks of T x M matrices, each an identity stacked on a code block."""

    blocks: tuple

    @property
    def n(self) -> int:
        return len(self.blocks)


def lift(code_blocks: Sequence[Mat]) -> LiftedCodeword:
    """Prepend an identity to every (T - M) x M block."""
    out = []
    for blk in code_blocks:
        ident = Mat.identity(blk.field, blk.cols)
        out.append(ident.vstack(blk))
    return LiftedCodeword(tuple(out))


def split_blocks(codeword: Mat, n: int) -> list:
    """Split a (T - M) x nM matrix into its n width-M blocks."""
    if codeword.cols % n:
        raise ShapeError("column count must divide into n blocks")
    w = codeword.cols // n
    return [codeword.take_cols(range(i * w, (i + 1) * w)) for i in range(n)]


def lifted_rate(log2_size: float, n: int, T: int, q: int) -> float:
    """Normalized rate log2|C| / (n T log2 q) of the lifted code."""
    return log2_size / (n * T * math.log2(q))


def extract_channel(y_blocks: Sequence[Mat], M: int):
    """Recover (H_i, Ytilde_i) from received blocks [H_i; Xtilde_i H_i]."""
    hs, ys = [], []
    for y in y_blocks:
        hs.append(y.take_rows(range(M)))
        ys.append(y.take_rows(range(M, y.rows)))
    return hs, ys


@dataclass(frozen=True)
class DecodeResult:
    status: str  # "decoded" | "ambiguous"
    message: Optional[list]
    codeword: Optional[Mat]
    guaranteed: bool


def decode_known_H(
    code: GabidulinCode, ytilde_blocks: Sequence[Mat], h_blocks: Sequence[Mat]
) -> DecodeResult:
    """Solve codeword @ blockdiag(H) = received jointly with the code's
    GF(q)-linear constraints; unique solution means correct whenever
    rank(blockdiag(H)) reaches the guarantee threshold."""
    n = len(h_blocks)
    if len(ytilde_blocks) != n:
        raise ShapeError("one received block per channel block expected")
    M = h_blocks[0].rows
    if code.m_cols != n * M:
        raise ShapeError(
            f"code columns {code.m_cols} do not match n M = {n * M}"
        )
    # stack the per-basis-codeword images as rows of one linear system
    basis = code.message_basis()
    rows = []
    for _, e in basis:
        blocks = split_blocks(e, n)
        img = [blk @ h for blk, h in zip(blocks, h_blocks)]
        rows.append(np.hstack([b.a for b in img]).reshape(-1))
    a = Mat(code.base_field, np.array(rows, dtype=np.int64))
    y = Mat(code.base_field, np.hstack([b.a for b in ytilde_blocks]).reshape(1, -1))
    total_rank = sum(h.rank() for h in h_blocks)
    guaranteed = total_rank >= n * M - code.designed_distance + 1
    sol = solve_linear(a, y)
    if sol.kind == "inconsistent":
        raise InternalError("received word outside the code image")
    if sol.kind == "multiple":
        return DecodeResult("ambiguous", None, None, guaranteed)
    coords = [int(v) for v in sol.x.a[0]]
    message = code.message_from_coordinates(coords)
    return DecodeResult("decoded", message, code.encode(message), guaranteed)


def min_distance_decode(
    code: GabidulinCode, ytilde_blocks: Sequence[Mat], h_blocks: Sequence[Mat]
):
    """Reference decoder: enumerate codewords, return all argmins of
    d(received, codeword @ H).  Only for tiny codes."""
    n = len(h_blocks)
    y = Mat(code.base_field, np.hstack([b.a for b in ytilde_blocks]))
    best, arg = None, []
    for msg in code.messages():
        cw = code.encode(msg)
        blocks = split_blocks(cw, n)
        img = Mat(
            code.base_field,
            np.hstack([(blk @ h).a for blk, h in zip(blocks, h_blocks)]),
        )
        d = rank_distance(img, y)
        if best is None or d < best:
            best, arg = d, [msg]
        elif d == best:
            arg.append(msg)
    return best, arg


# -- throughput ------------------------------------------------------------------


def throughput_rm(
    rank_pmf: RankPmf, T: int, M: int, n: int, k: int, q: int
) -> float:
    """Zero-error throughput of the lifted code with message dimension k:
    rate times the probability the decoding guarantee holds."""
    if T - M < n * M:
        raise NotConstructible(
            "no MRD construction when the code would need more columns "
            "than rows (T - M < n M)"
        )
    t = T - M
    rate = lifted_rate(t * k * math.log2(q), n, T, q)
    threshold = k  # n M - D + 1 with D = n M - k + 1
    pmf_n = rank_pmf.n_fold(n)
    return rate * pmf_n.tail(threshold)


def best_throughput_rm(rank_pmf: RankPmf, T: int, M: int, n: int, q: int):
    """Best throughput over the message dimension; (value, best k)."""
    nstar = rank_pmf.max_rank
    best, best_k = 0.0, 0
    for k in range(1, n * min(M, nstar) + 1):
        val = throughput_rm(rank_pmf, T, M, n, k, q)
        if val > best + 1e-15:
            best, best_k = val, k
    return best, best_k


def rho_comparison(rank_pmf: RankPmf, T: int, M: int, n: int, q: int):
    """(best throughput over k, rho(n) times the training rate): the two
    coincide whenever the needed MRD codes exist."""
    from .capacity import channel_training_rate, rho_n

    best, _ = best_throughput_rm(rank_pmf, T, M, n, q)
    rep = rho_n(rank_pmf, n, rank_pmf.max_rank)
    return best, rep.rho * channel_training_rate(rank_pmf, T, M)


def simulate_rm(
    code: GabidulinCode,
    model: ChannelModel,
    n: int,
    trials: int,
    rng,
) -> dict:
    """Monte Carlo transmit/decode loop; counts guarantees and errors."""
    field = model.field
    guaranteed = 0
    decoded_when_guaranteed = 0
    errors = 0
    ambiguous = 0
    ext_q = code.ext.q
    for _ in range(trials):
        msg_idx = [int(v) for v in rng.integers(0, ext_q, size=code.k)]
        msg = code.message_from_indices(msg_idx)
        cw = code.encode(msg)
        blocks = split_blocks(cw, n)
        lifted = lift(blocks)
        y_blocks = [model.transmit(b, rng) for b in lifted.blocks]
        hs, ys = extract_channel(y_blocks, model.M)
        res = decode_known_H(code, ys, hs)
        if res.guaranteed:
            guaranteed += 1
            if res.status == "decoded" and res.message == msg:
                decoded_when_guaranteed += 1
            else:
                errors += 1
        elif res.status == "decoded" and res.message != msg:
            errors += 1
        if res.status == "ambiguous":
            ambiguous += 1
    return {
        "trials": trials,
        "guaranteed": guaranteed,
        "decoded_when_guaranteed": decoded_when_guaranteed,
        "decode_errors": errors,
        "ambiguous": ambiguous,
        "rate": lifted_rate(code.log2_size, n, model.T, field.q),
        "throughput": throughput_rm(
            model.rank_pmf(), model.T, model.M, n, code.k, field.q
        ),
    }
