"""Counting functions for matrices and subspaces over GF(q).

Everything is provided twice: exactly over big integers, and in the
log2 domain so that bounds stay computable when the dimension runs into
the thousands and the exact values no longer fit any machine word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class GFCounts:
    """Counting context for a fixed field size q >= 2."""

    q: int
    log2_q: float = field(init=False)

    def __post_init__(self):
        if self.q < 2:
            raise DomainError(f"field size must be >= 2, got {self.q}")
        object.__setattr__(self, "log2_q", math.log2(self.q))

    # -- full-rank matrix counts ------------------------------------------

    def chi(self, m: int, r: int) -> int:
        """Number of full-rank m x r matrices (r <= m); 1 when r = 0."""
        self._check(m, r)
        q = self.q
        qm = q**m
        out = 1
        for i in range(r):
            out *= qm - q**i
        return out

    def log2_chi(self, m: int, r: int) -> float:
        """log2 of chi(m, r) without forming q**m; stable for huge m."""
        self._check(m, r)
        total = 0.0
        for i in range(r):
            # log2(q^m - q^i) = i*log2 q + (m-i)*log2 q + log2(1 - q^-(m-i))
            total += i * self.log2_q + self._log2_qpow_minus_one(m - i)
        return total

    def chi_tilde(self, m: int, r: int) -> float:
        """Probability that a uniformly random m x r matrix has full rank."""
        self._check(m, r)
        q = self.q
        out = 1.0
        for i in range(m - r + 1, m + 1):
            out *= 1.0 - q ** (-i)
        return out

    def log2_chi_tilde(self, m: int, r: int) -> float:
        self._check(m, r)
        q = self.q
        return sum(
            math.log1p(-(q ** (-i))) / _LN2 for i in range(m - r + 1, m + 1)
        )

    # -- subspace counts ---------------------------------------------------

    def gaussian_binomial(self, m: int, r: int) -> int:
        """Number of r-dimensional subspaces of GF(q)^m."""
        self._check(m, r)
        num = self.chi(m, r)
        den = self.chi(r, r)
        out, rem = divmod(num, den)
        assert rem == 0
        return out

    def log2_gaussian_binomial(self, m: int, r: int) -> float:
        self._check(m, r)
        return self.log2_chi(m, r) - self.log2_chi(r, r)

    def rank_count(self, m: int, n: int, r: int) -> int:
        """Number of m x n matrices of rank exactly r."""
        if r < 0 or r > min(m, n):
            raise DomainError(f"rank {r} infeasible for {m}x{n}")
        out, rem = divmod(self.chi(m, r) * self.chi(n, r), self.chi(r, r))
        assert rem == 0
        return out

    def rank_fraction(self, m: int, n: int, r: int) -> Fraction:
        """Probability a uniformly random m x n matrix has rank r."""
        return Fraction(self.rank_count(m, n, r), self.q ** (m * n))

    def extension_count(self, m: int, r: int, s: int) -> int:
        """Number of r-dim subspaces of GF(q)^m containing a fixed s-dim one."""
        if not 0 <= s <= r <= m:
            raise DomainError(f"need 0 <= s <= r <= m, got s={s} r={r} m={m}")
        return self.gaussian_binomial(m - s, r - s)

    def pj_size(self, m_cap: int, t: int) -> int:
        """Number of subspaces of GF(q)^t with dimension <= m_cap."""
        if m_cap > t:
            raise DomainError(f"m_cap={m_cap} exceeds ambient dimension {t}")
        return sum(self.gaussian_binomial(t, r) for r in range(m_cap + 1))

    def pj_bound_check(self, m: int) -> bool:
        """Check |P(F^m)| < q^(m^2/2 + log_q m + 1.8)."""
        size = self.pj_size(m, m)
        exponent = m * m / 2.0 + math.log(m, self.q) + 1.8
        return math.log2(size) < exponent * self.log2_q

    # -- analytic constants ------------------------------------------------

    def xi(self, s: int) -> float:
        """Infinite product prod_{i>=s} (1 - q^-i), truncated when the
        residual tail sum of q^-i drops below 1e-15."""
        if s < 1:
            raise DomainError(f"xi needs s >= 1, got {s}")
        q = self.q
        out = 1.0
        i = s
        while True:
            out *= 1.0 - q ** (-i)
            i += 1
            # remaining tail: sum_{j>=i} q^-j = q^-(i-1)/(q-1)
            if q ** (-(i - 1)) / (q - 1) < 1e-15:
                return out

    # -- internal ----------------------------------------------------------

    def _check(self, m: int, r: int):
        if not 0 <= r <= m:
            raise DomainError(f"need 0 <= r <= m, got r={r} m={m}")

    def _log2_qpow_minus_one(self, j: int) -> float:
        """log2(q^j - 1) for j >= 1."""
        return j * self.log2_q + math.log1p(-(self.q ** (-j))) / _LN2
