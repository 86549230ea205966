"""Linear operator channel models: Y = X H over GF(q).

H is drawn independently per T-row block and is unknown to both ends.
Models expose exact transition kernels (closed form where available,
otherwise summation over the H support), derived rank/subspace random
variables, alpha-type input machinery, and an exact mutual-information
oracle for channels small enough to enumerate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .counting import GFCounts
from .errors import (
    DomainError,
    ExactKernelUnavailable,
    NotFullRank,
    ShapeError,
    TooLarge,
)
from .fields import FieldSpec
from .matrix import Mat, Subspace, all_matrices, enumerate_subspaces, sample_matrix

ENUM_GUARD = 1 << 16  # exact oracles refuse beyond this many states

PURELY_RANDOM = "purely_random"
FULL_RANK = "full_rank"
RANK_UNIFORM = "rank_uniform"
FIXED = "fixed"
NETWORK = "network"
Z = "z"

_KINDS = (PURELY_RANDOM, FULL_RANK, RANK_UNIFORM, FIXED, NETWORK, Z)


@dataclass(frozen=True)
class RankPmf:
    """Distribution of rank(H) on {0..len(probs)-1}."""

    probs: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise DomainError("rank pmf must be a non-empty vector")
        if p.min() < 0 or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError("rank pmf must be nonnegative and sum to 1")
        object.__setattr__(self, "probs", tuple(float(v) for v in p))

    @property
    def mean(self) -> float:
        return sum(r * pr for r, pr in enumerate(self.probs))

    @property
    def max_rank(self) -> int:
        return len(self.probs) - 1

    @property
    def rank_star(self) -> int:
        """Largest rank with positive probability."""
        for r in range(self.max_rank, -1, -1):
            if self.probs[r] > 0:
                return r
        raise DomainError("pmf has no support")  # pragma: no cover

    def tail(self, r: int) -> float:
        return sum(self.probs[max(r, 0):])

    def is_regular(self, m: int) -> bool:
        return self.max_rank >= m and all(self.probs[r] > 0 for r in range(m + 1))

    def convolve(self, other: "RankPmf") -> "RankPmf":
        return RankPmf(tuple(np.convolve(self.probs, other.probs)))

    def n_fold(self, n: int) -> "RankPmf":
        """Distribution of the rank of a block diagonal of n iid copies."""
        if n < 1:
            raise DomainError("n must be >= 1")
        out = np.array([1.0])
        base = np.asarray(self.probs)
        for _ in range(n):
            out = np.convolve(out, base)
        return RankPmf(tuple(out))

    @classmethod
    def point(cls, r: int, max_rank: Optional[int] = None) -> "RankPmf":
        hi = r if max_rank is None else max_rank
        probs = [0.0] * (hi + 1)
        probs[r] = 1.0
        return cls(tuple(probs))


@dataclass(frozen=True)
class KernelTable:
    """P(rank(Y) = s | rank(X) = r) rows for r = 0..rmax."""

    P: np.ndarray  # (rmax+1, smax+1)
    provenance: str  # closed_form | enumerated | monte_carlo
    n_samples: int = 0

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        tol = 3.0 / math.sqrt(self.n_samples) if self.n_samples else 1e-9
        for r in range(P.shape[0]):
            if abs(P[r].sum() - 1.0) > max(tol, 1e-9):
                raise DomainError(f"kernel row {r} does not sum to 1")
            for s in range(r + 1, P.shape[1]):
                if self.n_samples == 0 and P[r, s] != 0.0:
                    raise DomainError("rank cannot increase through the channel")
        object.__setattr__(self, "P", P)

    @property
    def rmax(self) -> int:
        return self.P.shape[0] - 1


class ChannelModel:
    """loc(H, T): a T x M input block is multiplied by a random M x N H."""

    def __init__(
        self,
        field: FieldSpec,
        T: int,
        M: int,
        N: int,
        kind: str,
        rank_pmf: Optional[RankPmf] = None,
        H: Optional[Mat] = None,
        p: Optional[float] = None,
        coeff_dist: str = "uniform",
        seed: Optional[int] = None,
    ):
        if kind not in _KINDS:
            raise DomainError(f"unknown channel kind {kind!r}")
        if T < 1 or M < 1 or N < 1:
            raise DomainError("T, M, N must all be >= 1")
        if kind == Z:
            if (T, M, N) != (1, 1, 1) or field.q != 2:
                raise DomainError("the z kind requires T = M = N = 1 over GF(2)")
            if p is None or not 0.0 <= p <= 1.0:
                raise DomainError("z kind needs a crossover probability in [0, 1]")
        if kind == NETWORK and (M, N) != (2, 2):
            raise DomainError("the network example is a 2x2 channel")
        if kind == FIXED:
            if H is None or H.shape != (M, N) or H.field != field:
                raise DomainError("fixed kind needs an M x N transformation matrix")
        if kind == RANK_UNIFORM:
            if rank_pmf is None:
                raise DomainError("rank_uniform kind needs a rank pmf")
            if rank_pmf.rank_star > min(M, N):
                raise DomainError("rank pmf exceeds min(M, N)")
        if coeff_dist not in ("uniform", "nonzero_uniform"):
            raise DomainError(f"unknown coefficient distribution {coeff_dist!r}")
        self.field = field
        self.T = T
        self.M = M
        self.N = N
        self.kind = kind
        self._rank_pmf = rank_pmf
        self.H = H
        self.p = p
        self.coeff_dist = coeff_dist
        self.seed = seed
        self._counts = GFCounts(field.q)
        self._support_cache = None
        self._rank_classes = None

    # -- config ----------------------------------------------------------------

    @classmethod
    def from_config(cls, cfg: dict) -> "ChannelModel":
        field = FieldSpec.from_config(cfg["field"])
        kind = cfg["kind"]
        kwargs = {}
        if kind == RANK_UNIFORM:
            kwargs["rank_pmf"] = RankPmf(tuple(cfg["rank_pmf"]))
        if kind == FIXED:
            kwargs["H"] = Mat.from_config(field, cfg["H"])
        if kind == Z:
            kwargs["p"] = cfg["p"]
        if "coeff_dist" in cfg:
            kwargs["coeff_dist"] = cfg["coeff_dist"]
        return cls(
            field, cfg["T"], cfg["M"], cfg["N"], kind,
            seed=cfg.get("seed"), **kwargs,
        )

    def with_T(self, T: int) -> "ChannelModel":
        return ChannelModel(
            self.field, T, self.M, self.N, self.kind,
            rank_pmf=self._rank_pmf, H=self.H, p=self.p,
            coeff_dist=self.coeff_dist, seed=self.seed,
        )

    def __repr__(self):
        return (
            f"ChannelModel({self.field!r}, T={self.T}, M={self.M}, "
            f"N={self.N}, kind={self.kind!r})"
        )

    # -- rank law ------------------------------------------------------------------

    def rank_pmf(self) -> RankPmf:
        nstar = min(self.M, self.N)
        if self.kind == RANK_UNIFORM:
            probs = list(self._rank_pmf.probs) + [0.0] * (
                nstar + 1 - len(self._rank_pmf.probs)
            )
            return RankPmf(tuple(probs[: nstar + 1]))
        if self.kind == PURELY_RANDOM:
            total = self.field.q ** (self.M * self.N)
            return RankPmf(tuple(
                self._counts.rank_count(self.M, self.N, r) / total
                for r in range(nstar + 1)
            ))
        if self.kind == FULL_RANK:
            return RankPmf.point(nstar)
        if self.kind == FIXED:
            return RankPmf.point(self.H.rank(), nstar)
        if self.kind == Z:
            return RankPmf((self.p, 1.0 - self.p))
        # network: enumerate the coefficient draws
        probs = np.zeros(nstar + 1)
        for hm, ph in self.h_support():
            probs[hm.rank()] += ph
        return RankPmf(tuple(probs))

    # -- sampling -------------------------------------------------------------------

    def sample_H(self, rng) -> Mat:
        if self.kind == PURELY_RANDOM:
            return sample_matrix(self.field, self.M, self.N, rng)
        if self.kind == FULL_RANK:
            return sample_matrix(self.field, self.M, self.N, rng, kind="full_rank")
        if self.kind == RANK_UNIFORM:
            k = self._draw_rank(rng)
            return sample_matrix(self.field, self.M, self.N, rng,
                                 kind="rank_exact", rank=k)
        if self.kind == FIXED:
            return self.H
        if self.kind == Z:
            return Mat(self.field, [[0 if rng.random() < self.p else 1]])
        a1, a2, b1, b2 = self._draw_coeffs(rng, 4)
        return Mat(self.field, [[a1, self.field.mul(a2, b1)], [0, b2]])

    def sample_H_batch(self, rng, count: int) -> np.ndarray:
        """(count, M, N) block of independent draws; vectorized where the
        rank classes are small enough to enumerate once."""
        q = self.field.q
        if self.kind == PURELY_RANDOM:
            return rng.integers(0, q, size=(count, self.M, self.N), dtype=np.int64)
        if self.kind in (RANK_UNIFORM, FULL_RANK) and q ** (self.M * self.N) <= 4096:
            classes = self._rank_class_arrays()
            pmf = self.rank_pmf()
            ks = rng.choice(len(pmf.probs), size=count, p=pmf.probs)
            out = np.empty((count, self.M, self.N), dtype=np.int64)
            for k in np.unique(ks):
                sel = ks == k
                pool = classes[int(k)]
                out[sel] = pool[rng.integers(0, pool.shape[0], size=int(sel.sum()))]
            return out
        return np.stack([self.sample_H(rng).a for _ in range(count)])

    def transmit(self, X: Mat, rng) -> Mat:
        if X.field != self.field or X.cols != self.M:
            raise ShapeError("input must be T x M over the channel field")
        return X @ self.sample_H(rng)

    def _draw_rank(self, rng) -> int:
        pmf = self._rank_pmf
        return int(rng.choice(len(pmf.probs), p=pmf.probs))

    def _draw_coeffs(self, rng, n: int):
        if self.coeff_dist == "uniform":
            return [int(v) for v in rng.integers(0, self.field.q, size=n)]
        return [int(v) for v in rng.integers(1, self.field.q, size=n)]

    def _rank_class_arrays(self):
        if self._rank_classes is None:
            classes: dict[int, list] = {}
            for m in all_matrices(self.field, self.M, self.N):
                classes.setdefault(m.rank(), []).append(m.a)
            self._rank_classes = {
                k: np.stack(v) for k, v in classes.items()
            }
        return self._rank_classes

    # -- exact kernels ------------------------------------------------------------------

    def support_size(self) -> int:
        q = self.field.q
        if self.kind == FIXED:
            return 1
        if self.kind == Z:
            return 2
        if self.kind == NETWORK:
            return q**4
        return q ** (self.M * self.N)

    def h_support(self) -> list[tuple[Mat, float]]:
        """All (H, probability) pairs; ExactKernelUnavailable when too big."""
        if self._support_cache is not None:
            return self._support_cache
        if self.support_size() > ENUM_GUARD:
            raise ExactKernelUnavailable(
                f"H support of size {self.support_size()} exceeds {ENUM_GUARD}"
            )
        q = self.field.q
        out: list[tuple[Mat, float]] = []
        if self.kind == FIXED:
            out = [(self.H, 1.0)]
        elif self.kind == Z:
            out = [(Mat(self.field, [[0]]), self.p),
                   (Mat(self.field, [[1]]), 1.0 - self.p)]
        elif self.kind == NETWORK:
            acc: dict[bytes, list] = {}
            lo = 1 if self.coeff_dist == "nonzero_uniform" else 0
            count = (q - lo) ** 4
            for a1, a2, b1, b2 in itertools.product(range(lo, q), repeat=4):
                hm = Mat(self.field, [[a1, self.field.mul(a2, b1)], [0, b2]])
                ent = acc.setdefault(hm.key(), [hm, 0.0])
                ent[1] += 1.0 / count
            out = [(hm, pr) for hm, pr in acc.values()]
        elif self.kind == PURELY_RANDOM:
            pr = 1.0 / q ** (self.M * self.N)
            out = [(m, pr) for m in all_matrices(self.field, self.M, self.N)]
        elif self.kind == FULL_RANK:
            mats = [m for m in all_matrices(self.field, self.M, self.N)
                    if m.rank() == min(self.M, self.N)]
            out = [(m, 1.0 / len(mats)) for m in mats]
        else:  # rank_uniform
            pmf = self.rank_pmf()
            for m in all_matrices(self.field, self.M, self.N):
                r = m.rank()
                if pmf.probs[r] > 0:
                    out.append(
                        (m, pmf.probs[r] / self._counts.rank_count(self.M, self.N, r))
                    )
        self._support_cache = out
        return out

    def exact_transition(self, X: Mat, Y: Mat) -> float:
        """P(Y | X) = Pr{X H = Y}; closed form or exact summation."""
        if X.field != self.field or Y.field != self.field:
            raise ShapeError("matrices over a different field")
        if X.cols != self.M or Y.cols != self.N or X.rows != Y.rows:
            raise ShapeError("transition needs t x M and t x N blocks")
        q = self.field.q
        if self.kind == PURELY_RANDOM:
            cx = Subspace.from_col_span(X)
            cy = Subspace.from_col_span(Y)
            if not cx.contains(cy):
                return 0.0
            return float(q) ** (-self.N * X.rank())
        if self.kind == FULL_RANK and self.M <= self.N:
            if Subspace.from_col_span(X) != Subspace.from_col_span(Y):
                return 0.0
            return 1.0 / self._counts.chi(self.N, X.rank())
        if self.kind == FIXED:
            return 1.0 if (X @ self.H) == Y else 0.0
        if self.kind == Z:
            x, y = int(X.a[0, 0]), int(Y.a[0, 0])
            if x == 0:
                return 1.0 if y == 0 else 0.0
            return self.p if y == 0 else 1.0 - self.p
        # generic: sum pmf(H) over the affine solution set of X H = Y
        sols = _solution_space(X, Y)
        if sols is None:
            return 0.0
        h0, kernel = sols
        n_free = kernel.shape[0] * self.N
        if q**n_free > ENUM_GUARD:
            raise ExactKernelUnavailable(
                f"solution set of size q^{n_free} exceeds the guard"
            )
        total = 0.0
        for coeffs in itertools.product(range(q), repeat=n_free):
            c = Mat(self.field, np.array(coeffs, dtype=np.int64).reshape(
                kernel.shape[0], self.N))
            hm = h0 + (Mat(self.field, kernel).T @ c)
            total += self.pmf_of_H(hm)
        return total

    def pmf_of_H(self, Hm: Mat) -> float:
        q = self.field.q
        if self.kind == PURELY_RANDOM:
            return float(q) ** (-self.M * self.N)
        if self.kind == FULL_RANK:
            if Hm.rank() != min(self.M, self.N):
                return 0.0
            return 1.0 / self._counts.rank_count(self.M, self.N, min(self.M, self.N))
        if self.kind == FIXED:
            return 1.0 if Hm == self.H else 0.0
        if self.kind == Z:
            return self.p if Hm.a[0, 0] == 0 else 1.0 - self.p
        if self.kind == RANK_UNIFORM:
            r = Hm.rank()
            pr = self.rank_pmf().probs[r] if r < len(self.rank_pmf().probs) else 0.0
            if pr == 0.0:
                return 0.0
            return pr / self._counts.rank_count(self.M, self.N, r)
        for hm, ph in self.h_support():
            if hm == Hm:
                return ph
        return 0.0

    # -- rank kernels ---------------------------------------------------------------------

    def rank_kernel_subspace(self, u: Subspace) -> np.ndarray:
        """Pr{rank(D H) = s}, s = 0..dim(u), for D any basis of the row
        space u of the input; exact by summation over the H support."""
        if u.ambient_dim != self.M:
            raise ShapeError("row space must live in F^M")
        d = u.basis
        out = np.zeros(u.dim + 1)
        if u.dim == 0:
            out[0] = 1.0
            return out
        for hm, ph in self.h_support():
            out[(d @ hm).rank()] += ph
        return out

    def rank_kernel_row(self, r: int) -> tuple[np.ndarray, str]:
        """Pr{rank(Y) = s | rank(X) = r} for alpha-type inputs with the
        uniform subspace law; (row, provenance)."""
        if not 0 <= r <= min(self.T, self.M):
            raise DomainError(f"input rank {r} infeasible")
        q = self.field.q
        if self.kind == PURELY_RANDOM:
            # D H is purely random r x N for any full-rank D
            total = q ** (r * self.N)
            row = np.array([
                self._counts.rank_count(r, self.N, s) / total
                for s in range(r + 1)
            ])
            return row, "closed_form"
        if self.kind in (RANK_UNIFORM, FULL_RANK, Z):
            pmf = self.rank_pmf()
            row = np.zeros(r + 1)
            for k, pk in enumerate(pmf.probs):
                if pk == 0:
                    continue
                for s in range(min(r, k) + 1):
                    row[s] += pk * rank_class_kernel(self._counts, self.M, r, k, s)
            return row, "closed_form"
        # general kinds: average subspace kernels over the Grassmannian
        if self._counts.gaussian_binomial(self.M, r) * self.support_size() > ENUM_GUARD * 16:
            raise ExactKernelUnavailable("too many subspaces to average exactly")
        row = np.zeros(r + 1)
        n_subs = 0
        for u in enumerate_subspaces(self.field, self.M, r):
            row += self.rank_kernel_subspace(u)
            n_subs += 1
        return row / n_subs, "enumerated"

    def rank_kernel_row_mc(self, r: int, rng, n_samples: int = 10**4) -> tuple[np.ndarray, str]:
        """Monte Carlo fallback for the alpha-uniform rank kernel."""
        row = np.zeros(r + 1)
        for _ in range(n_samples):
            d = sample_matrix(self.field, r, self.M, rng, kind="full_rank")
            row[(d @ self.sample_H(rng)).rank()] += 1
        return row / n_samples, "monte_carlo"

    def kernel_table(self, rmax: Optional[int] = None) -> KernelTable:
        rmax = min(self.T, self.M) if rmax is None else rmax
        smax = min(rmax, self.N)
        P = np.zeros((rmax + 1, smax + 1))
        provenance = "closed_form"
        for r in range(rmax + 1):
            row, prov = self.rank_kernel_row(r)
            P[r, : min(r, smax) + 1] = row[: smax + 1]
            if prov != "closed_form":
                provenance = prov
        return KernelTable(P, provenance)


def mixing_rank_kernel(counts: GFCounts, r: int, k: int, s: int) -> float:
    """Pr{rank(G H) = s} for a purely random r x M matrix G and any fixed
    H of rank k: the fraction of r x k matrices having rank s.  This is
    the extended-channel-training mixing law; it does not depend on M."""
    if s > min(r, k):
        return 0.0
    from fractions import Fraction

    return float(
        Fraction(counts.rank_count(r, k, s), counts.q ** (r * k))
    )


def subspace_intersection_count(counts: GFCounts, m: int, kappa: int, k: int, j: int) -> int:
    """Number of k-dim subspaces V of F^m with dim(V cap K) = j, for one
    fixed kappa-dim subspace K."""
    if j < 0 or j > min(k, kappa) or (k - j) > (m - kappa):
        return 0
    return (
        counts.gaussian_binomial(kappa, j)
        * counts.gaussian_binomial(m - kappa, k - j)
        * counts.q ** ((kappa - j) * (k - j))
    )


def rank_class_kernel(counts: GFCounts, m: int, r: int, k: int, s: int) -> float:
    """Pr{rank(D H) = s} for a fixed full-rank r x m matrix D and H
    uniform on the rank-k class of m x n matrices.

    rank(D H) = k - dim(colspace(H) cap ker D) with colspace(H) uniform on
    the Grassmannian of k-dim subspaces, so the law is q-hypergeometric
    in the intersection dimension and independent of both n and the row
    space of D (only dim ker D = m - r enters).
    """
    if s > min(r, k):
        return 0.0
    from fractions import Fraction

    num = subspace_intersection_count(counts, m, m - r, k, k - s)
    return float(Fraction(num, counts.gaussian_binomial(m, k)))


def _solution_space(X: Mat, Y: Mat):
    """Affine solution set {H : X H = Y} as (particular, kernel rows);
    None when inconsistent."""
    f = X.field
    red, r, piv = X.rref()
    # consistency and particular solution, column by column via [X | Y]
    aug = X.hstack(Y)
    red_a, r_a, piv_a = aug.rref()
    if any(c >= X.cols for c in piv_a):
        return None
    h0 = np.zeros((X.cols, Y.cols), dtype=np.int64)
    for i, c in enumerate(piv_a):
        h0[c, :] = red_a.a[i, X.cols:]
    # kernel of v -> X v from the rref of X
    free = [c for c in range(X.cols) if c not in piv]
    kernel = np.zeros((len(free), X.cols), dtype=np.int64)
    for row_idx, fc in enumerate(free):
        kernel[row_idx, fc] = 1
        for i, c in enumerate(piv):
            kernel[row_idx, c] = f.neg(int(red.a[i, fc]))
    return Mat(f, h0), kernel


# -- alpha-type inputs ------------------------------------------------------------


@dataclass
class AlphaInput:
    """Input pmf constant on row-space classes:
    p(X) = R(rank X) * Q_rank(row space of X) / chi(T, rank X)."""

    field: FieldSpec
    T: int
    M: int
    R: RankPmf
    Q: Optional[dict] = None  # rank -> list[(Subspace, prob)]; None = uniform

    def __post_init__(self):
        if self.R.max_rank > min(self.T, self.M):
            raise DomainError("rank law exceeds min(T, M)")
        if self.Q is not None:
            for r, entries in self.Q.items():
                if abs(sum(pr for _, pr in entries) - 1.0) > 1e-9:
                    raise DomainError(f"subspace law for rank {r} does not sum to 1")
                if any(u.dim != r or u.ambient_dim != self.M for u, _ in entries):
                    raise DomainError("subspace law supported off its Grassmannian")

    def sample(self, rng) -> Mat:
        r = int(rng.choice(len(self.R.probs), p=self.R.probs))
        if r == 0:
            return Mat.zeros(self.field, self.T, self.M)
        if self.Q is None:
            d = sample_matrix(self.field, r, self.M, rng, kind="full_rank")
        else:
            entries = self.Q[r]
            idx = int(rng.choice(len(entries), p=[pr for _, pr in entries]))
            d = entries[idx][0].basis
        b = sample_matrix(self.field, self.T, r, rng, kind="full_rank")
        return b @ d

    def pmf(self, X: Mat) -> float:
        r = X.rank()
        if r >= len(self.R.probs) or self.R.probs[r] == 0:
            return 0.0
        counts = GFCounts(self.field.q)
        if r == 0:
            qr = 1.0  # the zero subspace is the whole rank-0 Grassmannian
        elif self.Q is None or r not in self.Q:
            qr = 1.0 / counts.gaussian_binomial(self.M, r)
        else:
            u = Subspace.from_row_span(X)
            qr = 0.0
            for sub, pr in self.Q[r]:
                if sub == u:
                    qr = pr
                    break
        return self.R.probs[r] * qr / counts.chi(self.T, r)

    def support(self) -> list[tuple[Mat, float]]:
        """All inputs with positive probability (enumeration guard)."""
        f = self.field
        if f.q ** (self.T * self.M) > ENUM_GUARD:
            raise TooLarge("input space exceeds the enumeration guard")
        out = []
        for x in all_matrices(f, self.T, self.M):
            p = self.pmf(x)
            if p > 0:
                out.append((x, p))
        return out


def random_alpha_input(field, T, M, rng, explicit_q: bool = False) -> AlphaInput:
    """Random alpha-type input for tests: Dirichlet rank law, optionally a
    random explicit subspace law per rank."""
    rmax = min(T, M)
    R = RankPmf(tuple(rng.dirichlet(np.ones(rmax + 1))))
    if not explicit_q:
        return AlphaInput(field, T, M, R)
    Q = {}
    for r in range(1, rmax + 1):
        subs = list(enumerate_subspaces(field, M, r))
        w = rng.dirichlet(np.ones(len(subs)))
        Q[r] = list(zip(subs, (float(v) for v in w)))
    return AlphaInput(field, T, M, R, Q)


# -- exact information quantities ------------------------------------------------


def _lens_key(m: Mat, lens: str):
    if lens == "matrix":
        return m.key()
    if lens == "subspace":
        return Subspace.from_col_span(m).key()
    if lens == "rank":
        return m.rank()
    raise DomainError(f"unknown lens {lens!r}")


def exact_mutual_information(
    model: ChannelModel, input_pmf, lens: str = "matrix"
) -> float:
    """I(X; Y) in bits by full enumeration, optionally through the
    subspace or rank projections of both ends."""
    if model.field.q ** (model.T * model.M) > ENUM_GUARD:
        raise TooLarge("q^(T M) exceeds the enumeration guard")
    if isinstance(input_pmf, AlphaInput):
        support = input_pmf.support()
    else:
        support = list(input_pmf)
    projected: dict = {}
    for x, px in support:
        if px <= 0:
            continue
        for hm, ph in model.h_support():
            y = x @ hm
            key = (_lens_key(x, lens), _lens_key(y, lens))
            projected[key] = projected.get(key, 0.0) + px * ph
    return mutual_information_from_joint(projected)


def mutual_information_from_joint(joint: dict) -> float:
    px: dict = {}
    py: dict = {}
    for (kx, ky), p in joint.items():
        px[kx] = px.get(kx, 0.0) + p
        py[ky] = py.get(ky, 0.0) + p
    out = 0.0
    for (kx, ky), p in joint.items():
        if p > 0:
            out += p * math.log2(p / (px[kx] * py[ky]))
    return out


def symmetry_check(model: ChannelModel, B: Mat, D: Mat, E: Mat):
    """Transition invariance under a full-column-rank left factor:
    P(BE | BD) versus Pr{D H = E}; returns (lhs, rhs, equal)."""
    if B.rank() != B.cols:
        raise NotFullRank("B must have full column rank")
    lhs = model.exact_transition(B @ D, B @ E)
    rhs = model.exact_transition(D, E)
    return lhs, rhs, abs(lhs - rhs) <= 1e-12


# -- the scalar z channel in closed form -------------------------------------------


def z_channel_capacity(p: float) -> float:
    if p >= 1.0:
        return 0.0
    if p <= 0.0:
        return 1.0
    return math.log2(1.0 + (1.0 - p) * p ** (p / (1.0 - p)))


def z_channel_optimal_p0(p: float) -> float:
    """Probability of sending 0 that attains the z-channel capacity."""
    if p <= 0.0:
        return 0.5
    if p >= 1.0:
        return 1.0
    return (1.0 - p ** (1.0 / (1.0 - p))) / (
        1.0 + (1.0 - p) * p ** (p / (1.0 - p))
    )
