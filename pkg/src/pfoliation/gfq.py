"""Small finite fields F_q, q = p^k, for point enumeration.

Elements are integers 0..q-1 encoding coefficient vectors base p: the index
c_0 + c_1 p + ... + c_{k-1} p^{k-1} stands for c_0 + c_1 a + ... against a
root a of a fixed irreducible polynomial.  For k = 1 arithmetic is plain
modular arithmetic; for k > 1 dense q x q lookup tables are precomputed, so
construction is only allowed for q up to a small bound.  Either way the
array-valued operations vectorise over numpy integer arrays, which is what
the brute-force singular-locus scans need.

F_p sits inside F_q as the indices 0..p-1.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

__all__ = ["GF", "gf", "as_prime_power"]

_TABLE_LIMIT = 1024  # largest q for which dense q x q tables are built


def as_prime_power(q: int, p: int) -> int:
    """The exponent k with q = p^k, or raise."""
    k = 0
    m = q
    while m > 1 and m % p == 0:
        m //= p
        k += 1
    if m != 1 or k == 0:
        raise ValueError(f"{q} is not a power of the characteristic {p}")
    return k


def _poly_mod(a, m, p):
    """Remainder of the coefficient list a modulo monic m, over F_p."""
    a = a[:]
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        if c:
            shift = len(a) - 1 - dm
            for i, mc in enumerate(m):
                a[shift + i] = (a[shift + i] - c * mc) % p
        while a and a[-1] == 0:
            a.pop()
        if not a:
            break
    return a


def _poly_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] = (out[i + j] + ca * cb) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def _irreducible(p: int, k: int):
    """A monic irreducible polynomial of degree k over F_p (trial division)."""
    divisor_candidates = []
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor_candidates.append(list(tail) + [1])
    for tail in itertools.product(range(p), repeat=k):
        cand = list(tail) + [1]
        if cand[0] == 0:
            continue  # divisible by x
        ok = True
        for div in divisor_candidates:
            if not _poly_mod(cand, div, p):
                ok = False
                break
        if ok:
            return cand
    raise RuntimeError(f"no irreducible polynomial of degree {k} over F_{p}")


class GF:
    """F_{p^k} with table-driven arithmetic on integer indices."""

    def __init__(self, p: int, k: int):
        q = p**k
        self.p = p
        self.k = k
        self.q = q
        if k == 1:
            self.modulus = None
            self._mul = None
            self._add = None
            self._inv = np.array(
                [0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64
            )
            return
        if q > _TABLE_LIMIT:
            raise ValueError(
                f"field order {q} exceeds the table limit {_TABLE_LIMIT}"
            )
        self.modulus = _irreducible(p, k)

        def digits(e):
            out = []
            for _ in range(k):
                e, r = divmod(e, p)
                out.append(r)
            return out

        def index(coeffs):
            e = 0
            for c in reversed(coeffs):
                e = e * p + c
            return e

        add = np.zeros((q, q), dtype=np.int32)
        mul = np.zeros((q, q), dtype=np.int32)
        vecs = [digits(e) for e in range(q)]
        for a in range(q):
            va = vecs[a]
            for b in range(a, q):
                vb = vecs[b]
                s = index([(x + y) % p for x, y in zip(va, vb)])
                add[a, b] = add[b, a] = s
                prod = _poly_mod(_poly_mul(va, vb, p), self.modulus, p)
                prod = prod + [0] * (k - len(prod))
                m = index(prod)
                mul[a, b] = mul[b, a] = m
        self._add = add
        self._mul = mul
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            # a^(q-2) by repeated table lookups
            acc, base, e = 1, a, q - 2
            while e:
                if e & 1:
                    acc = int(mul[acc, base])
                base = int(mul[base, base])
                e >>= 1
            inv[a] = acc
        self._inv = inv

    # -- scalar operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        return int(self._add[a, b])

    def neg(self, a: int) -> int:
        if self.k == 1:
            return (-a) % self.p
        # negation is digitwise
        p, out, mult = self.p, 0, 1
        for _ in range(self.k):
            a, r = divmod(a, p)
            out += ((-r) % p) * mult
            mult *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a * b) % self.p
        return int(self._mul[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return int(self._inv[a])

    def pow(self, a: int, e: int) -> int:
        acc = 1
        base = a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def sqrt(self, a: int):
        """Some square root of a, or None; brute force (q is small)."""
        for b in range(self.q):
            if self.mul(b, b) == a:
                return b
        return None

    def embed(self, c: int) -> int:
        """F_p residue as an element of F_q."""
        return c % self.p

    # -- vectorised operations ----------------------------------------------

    def add_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) + b) % self.p
        return self._add[a, b]

    def mul_arrays(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a, dtype=np.int64) * b) % self.p
        return self._mul[a, b]

    def pow_arrays(self, a: np.ndarray, e: int) -> np.ndarray:
        acc = np.ones_like(a)
        base = a
        while e:
            if e & 1:
                acc = self.mul_arrays(acc, base)
            e >>= 1
            if e:
                base = self.mul_arrays(base, base)
        return acc

    def __repr__(self):
        return f"GF({self.p}^{self.k})"


@lru_cache(maxsize=None)
def gf(p: int, k: int) -> GF:
    return GF(p, k)
