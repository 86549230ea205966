"""Exact arithmetic in GF(p) and GF(p^k).

Elements are handled in two interchangeable forms:

* coefficient vectors mod p (canonical representative, low degree first),
* packed integer indices (coefficients packed base p), which is what the
  matrix layer stores and what config files use.

Extension arithmetic always has a table-free polynomial path.  For
q <= 2**16 a log/antilog fast path is built lazily; it must agree with
the polynomial path bit for bit (tested exhaustively for small q).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DivideByZero, DomainError, FieldMismatch

_TABLE_LIMIT = 1 << 16  # log/antilog fast path allowed up to this q
_ADD_TABLE_LIMIT = 2048  # dense q x q add table for odd-characteristic towers

# Kernel arithmetic modes (consumed by the matrix backends).
KIND_PRIME = 0
KIND_CHAR2 = 1
KIND_TABLED = 2
KIND_GENERIC = 3


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# Polynomial arithmetic over an abstract coefficient field.
#
# A "base" is anything with .q, .add, .sub, .mul, .inv, .neg on integer
# indices.  Polynomials are tuples of indices, low degree first, with no
# trailing zeros (the zero polynomial is the empty tuple).
# ---------------------------------------------------------------------------


class _PrimeOps:
    """Minimal index arithmetic for GF(p); used before FieldSpec exists."""

    def __init__(self, p: int):
        self.q = p
        self.p = p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a == 0:
            raise DivideByZero("inverse of zero")
        return pow(a, self.p - 2, self.p)


def _poly_trim(c):
    n = len(c)
    while n and c[n - 1] == 0:
        n -= 1
    return tuple(c[:n])


def _poly_add(a, b, base):
    n = max(len(a), len(b))
    out = [0] * n
    for i in range(n):
        x = a[i] if i < len(a) else 0
        y = b[i] if i < len(b) else 0
        out[i] = base.add(x, y)
    return _poly_trim(out)


def _poly_mul(a, b, base):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            if y == 0:
                continue
            out[i + j] = base.add(out[i + j], base.mul(x, y))
    return _poly_trim(out)


def _poly_mod(a, m, base):
    """a mod m where m is monic."""
    a = list(a)
    dm = len(m) - 1
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i]
        if c == 0:
            continue
        a[i] = 0
        for j in range(dm):
            a[i - dm + j] = base.sub(a[i - dm + j], base.mul(c, m[j]))
    return _poly_trim(a)


def _poly_mulmod(a, b, m, base):
    return _poly_mod(_poly_mul(a, b, base), m, base)


def _poly_powmod(a, e, m, base):
    out = (1,)
    a = _poly_mod(a, m, base)
    while e:
        if e & 1:
            out = _poly_mulmod(out, a, m, base)
        a = _poly_mulmod(a, a, m, base)
        e >>= 1
    return out


def _poly_gcd(a, b, base):
    while b:
        # a mod b with b made monic
        lead = b[-1]
        if lead != 1:
            il = base.inv(lead)
            b = _poly_trim([base.mul(c, il) for c in b])
        a, b = b, _poly_mod(a, b, base)
    return a


def _prime_factors(n: int):
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def poly_is_irreducible(modulus: Sequence[int], base) -> bool:
    """Rabin test: monic f of degree k over the base field is irreducible
    iff x^(q^k) == x (mod f) and gcd(x^(q^(k/l)) - x, f) = 1 for every
    prime l dividing k."""
    f = _poly_trim(modulus)
    k = len(f) - 1
    if k < 1 or f[-1] != 1:
        return False
    x = (0, 1)
    q = base.q
    xqk = _poly_powmod(x, q**k, f, base)
    if xqk != _poly_mod(x, f, base):
        return False
    for ell in _prime_factors(k):
        h = _poly_powmod(x, q ** (k // ell), f, base)
        g = _poly_add(h, tuple(base.neg(c) for c in x), base)
        if len(_poly_gcd(g, f, base)) != 1:
            return False
    return True


def find_irreducible(base, degree: int) -> tuple:
    """Smallest monic irreducible of the given degree over the base field,
    ordered by the packed index of the non-leading coefficients."""
    q = base.q
    for packed in range(q**degree):
        coeffs = []
        v = packed
        for _ in range(degree):
            coeffs.append(v % q)
            v //= q
        coeffs.append(1)
        if poly_is_irreducible(coeffs, base):
            return tuple(coeffs)
    raise DomainError(f"no irreducible of degree {degree}")  # pragma: no cover


# Built-in irreducible moduli (low-to-high coefficient lists, monic) for
# p in {2, 3, 5}, k <= 12.  Each is the index-smallest monic irreducible of
# its degree; test_fields regenerates the low-degree entries.
_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 0, 0, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 1, 0, 1, 1, 0, 0, 0, 1),
    (2, 9): (1, 1, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (2, 12): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (3, 7): (2, 0, 1, 0, 0, 0, 0, 1),
    (3, 8): (2, 0, 1, 0, 0, 0, 0, 0, 1),
    (3, 9): (1, 0, 1, 2, 0, 0, 0, 0, 0, 1),
    (3, 10): (1, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 11): (2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (3, 12): (2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (5, 4): (2, 0, 0, 0, 1),
    (5, 5): (1, 4, 0, 0, 0, 1),
    (5, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (5, 8): (2, 0, 0, 0, 0, 0, 0, 0, 1),
    (5, 9): (3, 2, 1, 0, 0, 0, 0, 0, 0, 1),
    (5, 10): (3, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1),
    (5, 11): (1, 2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
    (5, 12): (4, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1),
}


def _builtin_modulus(p: int, k: int) -> tuple:
    try:
        return _MODULI[(p, k)]
    except KeyError:
        raise DomainError(
            f"no built-in modulus for p={p}, k={k}; supply one explicitly"
        ) from None


class KernelTables:
    """Arithmetic tables handed to the matrix kernels."""

    __slots__ = ("kind", "p", "q", "exp", "log", "inv", "add", "neg")

    def __init__(self, kind, p, q, exp=None, log=None, inv=None, add=None, neg=None):
        empty = np.zeros(0, dtype=np.int64)
        self.kind = kind
        self.p = p
        self.q = q
        self.exp = exp if exp is not None else empty
        self.log = log if log is not None else empty
        self.inv = inv if inv is not None else empty
        self.add = add if add is not None else np.zeros((0, 0), dtype=np.int64)
        self.neg = neg if neg is not None else empty


class FieldSpec:
    """GF(p^k) defined by a monic irreducible modulus over GF(p)."""

    __slots__ = ("p", "k", "modulus", "q", "_tables", "_po")

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None):
        if not _is_prime(p):
            raise DomainError(f"characteristic {p} is not prime")
        if k < 1:
            raise DomainError(f"extension degree must be >= 1, got {k}")
        if p**k > (1 << 64):
            raise DomainError("field size exceeds 2**64")
        self.p = p
        self.k = k
        self._po = _PrimeOps(p)
        if k == 1:
            self.modulus = (0, 1) if modulus is None else _poly_trim(modulus)
            if modulus is not None and self.modulus != _poly_trim(modulus):
                raise DomainError("modulus has trailing zero leading term")
        else:
            if modulus is None:
                modulus = _builtin_modulus(p, k)
            modulus = tuple(c % p for c in modulus)
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise DomainError(
                    f"modulus must be monic of degree {k}, got {list(modulus)}"
                )
            if k <= 16 and not poly_is_irreducible(modulus, self._po):
                raise DomainError(f"modulus {list(modulus)} is reducible over GF({p})")
            self.modulus = modulus
        self.q = p**k
        self._tables = None

    # -- identity ----------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.p == other.p
            and self.k == other.k
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.k})"

    @classmethod
    def from_config(cls, cfg: dict) -> "FieldSpec":
        return cls(cfg["p"], cfg.get("k", 1), cfg.get("modulus"))

    def to_config(self) -> dict:
        out = {"p": self.p, "k": self.k}
        if self.k > 1:
            out["modulus"] = list(self.modulus)
        return out

    # -- index <-> coefficients --------------------------------------------

    def coeffs_of(self, idx: int) -> tuple:
        if not 0 <= idx < self.q:
            raise DomainError(f"index {idx} out of range for {self!r}")
        out = []
        for _ in range(self.k):
            out.append(idx % self.p)
            idx //= self.p
        return tuple(out)

    def index_of(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.k:
            raise DomainError("too many coefficients")
        idx = 0
        for c in reversed(list(coeffs)):
            idx = idx * self.p + (c % self.p)
        return idx

    def element(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise FieldMismatch("element from a different field")
            return value
        if isinstance(value, (int, np.integer)):
            return FieldElement(self, self.coeffs_of(int(value)))
        return FieldElement(self, self._pad(value))

    def elements(self) -> Iterator["FieldElement"]:
        for i in range(self.q):
            yield self.element(i)

    def _pad(self, coeffs):
        c = [v % self.p for v in coeffs]
        if len(c) > self.k and any(c[self.k:]):
            raise DomainError("coefficient vector too long")
        c = c[: self.k] + [0] * (self.k - len(c))
        return tuple(c)

    # -- index arithmetic ----------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.index_of(
            [(x + y) % self.p for x, y in zip(self.coeffs_of(a), self.coeffs_of(b))]
        )

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.index_of([(-x) % self.p for x in self.coeffs_of(a)])

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        t = self._tables
        if t is not None and t.kind in (KIND_CHAR2, KIND_TABLED):
            if a == 0 or b == 0:
                return 0
            return int(t.exp[(int(t.log[a]) + int(t.log[b])) % (self.q - 1)])
        return self.mul_poly(a, b)

    def mul_poly(self, a: int, b: int) -> int:
        """Table-free polynomial multiplication (reference path)."""
        if self.k == 1:
            return (a * b) % self.p
        pa = _poly_trim(self.coeffs_of(a))
        pb = _poly_trim(self.coeffs_of(b))
        return self.index_of(_poly_mulmod(pa, pb, self.modulus, self._po))

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivideByZero(f"inverse of zero in {self!r}")
        if self.k == 1:
            return pow(a, self.p - 2, self.p)
        t = self._tables
        if t is not None and t.kind in (KIND_CHAR2, KIND_TABLED):
            return int(t.inv[a])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if a == 0:
            return 0 if e else 1
        e %= self.q - 1
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul_poly(out, base) if self.k > 1 else (out * base) % self.p
            base = self.mul_poly(base, base) if self.k > 1 else (base * base) % self.p
            e >>= 1
        return out

    def frobenius(self, a: int, base_power: int = 1, subfield_size: Optional[int] = None) -> int:
        """a^(q0^base_power) where q0 defaults to the prime subfield size."""
        q0 = self.p if subfield_size is None else subfield_size
        return self.pow(a, q0**base_power)

    # -- kernel tables -------------------------------------------------------

    def tables(self) -> KernelTables:
        if self._tables is not None:
            return self._tables
        if self.k == 1:
            inv = None
            if self.p <= _TABLE_LIMIT:
                inv = np.zeros(self.q, dtype=np.int64)
                for a in range(1, self.p):
                    inv[a] = pow(a, self.p - 2, self.p)
            t = KernelTables(KIND_PRIME, self.p, self.q, inv=inv)
        elif self.q <= _TABLE_LIMIT:
            exp, log = self._build_logs()
            inv = np.zeros(self.q, dtype=np.int64)
            for a in range(1, self.q):
                inv[a] = exp[(self.q - 1 - int(log[a])) % (self.q - 1)]
            neg = np.array([self.neg(a) for a in range(self.q)], dtype=np.int64)
            if self.p == 2:
                t = KernelTables(
                    KIND_CHAR2, self.p, self.q, exp=exp, log=log, inv=inv, neg=neg
                )
            elif self.q <= _ADD_TABLE_LIMIT:
                add = np.zeros((self.q, self.q), dtype=np.int64)
                for a in range(self.q):
                    for b in range(a, self.q):
                        v = self.add(a, b)
                        add[a, b] = v
                        add[b, a] = v
                t = KernelTables(
                    KIND_TABLED, self.p, self.q,
                    exp=exp, log=log, inv=inv, add=add, neg=neg,
                )
            else:
                t = KernelTables(KIND_GENERIC, self.p, self.q)
        else:
            t = KernelTables(KIND_GENERIC, self.p, self.q)
        self._tables = t
        return t

    def _build_logs(self):
        """Discrete log tables from the smallest primitive element."""
        order = self.q - 1
        factors = _prime_factors(order)
        g = None
        for cand in range(2, self.q):
            if all(
                self.pow(cand, order // f) != 1 for f in factors
            ):
                g = cand
                break
        assert g is not None, "no primitive element found"
        exp = np.zeros(order, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        v = 1
        for i in range(order):
            exp[i] = v
            log[v] = i
            v = self.mul_poly(v, g)
        return exp, log


class FieldElement:
    """Canonical coefficient-vector representative of a field value."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldSpec, coeffs: Sequence[int]):
        self.field = field
        self.coeffs = field._pad(coeffs)

    @property
    def index(self) -> int:
        return self.field.index_of(self.coeffs)

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other
        return self.field.element(other)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field.coeffs_of(self.field.add(self.index, o.index))
        )

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field.coeffs_of(self.field.sub(self.index, o.index))
        )

    def __neg__(self):
        return FieldElement(self.field, self.field.coeffs_of(self.field.neg(self.index)))

    def __mul__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field.coeffs_of(self.field.mul(self.index, o.index))
        )

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field.coeffs_of(self.field.div(self.index, o.index))
        )

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.coeffs_of(self.field.pow(self.index, e)))

    def inv(self):
        return FieldElement(self.field, self.field.coeffs_of(self.field.inv(self.index)))

    def frobenius(self, base_power: int = 1, subfield_size: Optional[int] = None):
        return FieldElement(
            self.field,
            self.field.coeffs_of(
                self.field.frobenius(self.index, base_power, subfield_size)
            ),
        )

    def __eq__(self, other):
        if isinstance(other, int):
            return self.index == other
        return (
            isinstance(other, FieldElement)
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"{self.field!r}:{self.index}"


@lru_cache(maxsize=64)
def GF(p: int, k: int = 1, modulus: Optional[tuple] = None) -> FieldSpec:
    """Cached field constructor; GF(2), GF(3, 2), ..."""
    return FieldSpec(p, k, modulus)


class ExtensionField:
    """GF(q^t) built as polynomials over an arbitrary base FieldSpec.

    Elements are length-t tuples of base-field indices, which makes the
    expansion of a symbol into a base-field column vector free.  Needed by
    the lifted rank-metric construction, where codeword symbols live in
    GF(q^t) but the channel runs over GF(q).
    """

    def __init__(self, base: FieldSpec, degree: int, modulus: Optional[Sequence[int]] = None):
        if degree < 1:
            raise DomainError("degree must be >= 1")
        self.base = base
        self.degree = degree
        if modulus is None:
            modulus = find_irreducible(base, degree)
        modulus = tuple(int(c) for c in modulus)
        if any(not 0 <= c < base.q for c in modulus):
            raise DomainError("modulus coefficients must be base-field indices")
        if len(_poly_trim(modulus)) != degree + 1 or modulus[degree] != 1:
            raise DomainError(f"modulus must be monic of degree {degree}")
        if not poly_is_irreducible(modulus, base):
            raise DomainError("modulus is reducible over the base field")
        self.modulus = _poly_trim(modulus)
        self.q = base.q**degree

    def zero(self) -> tuple:
        return (0,) * self.degree

    def one(self) -> tuple:
        return (1,) + (0,) * (self.degree - 1)

    def gen(self) -> tuple:
        """The class of z, a root of the modulus."""
        e = [0] * self.degree
        if self.degree == 1:
            # z = -modulus[0]
            e[0] = self.base.neg(self.modulus[0])
        else:
            e[1] = 1
        return tuple(e)

    def _pad(self, c) -> tuple:
        c = tuple(c)[: self.degree]
        return c + (0,) * (self.degree - len(c))

    def add(self, a, b):
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(self.base.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        prod = _poly_mulmod(_poly_trim(a), _poly_trim(b), self.modulus, self.base)
        return self._pad(prod)

    def pow(self, a, e: int):
        if not any(a):
            return self.one() if e == 0 else self.zero()
        e %= self.q - 1
        out = self.one()
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a):
        if not any(a):
            raise DivideByZero("inverse of zero")
        return self.pow(a, self.q - 2)

    def frobenius(self, a, j: int = 1):
        """a^(q0^j) with q0 the base field size; fixes the base field."""
        return self.pow(a, self.base.q**j)

    def from_index(self, idx: int) -> tuple:
        out = []
        for _ in range(self.degree):
            out.append(idx % self.base.q)
            idx //= self.base.q
        return tuple(out)

    def to_index(self, a) -> int:
        idx = 0
        for c in reversed(a):
            idx = idx * self.base.q + c
        return idx

    def elements(self) -> Iterator[tuple]:
        for i in range(self.q):
            yield self.from_index(i)
