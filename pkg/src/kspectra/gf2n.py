"""Arithmetic in binary fields F_2^n.

Field elements are plain ints: bit i of an element is the coefficient of
x^i in the polynomial basis modulo the reduction polynomial.  Zero and one
are therefore represented by 0 and 1.  A FieldCtx carries the degree, the
reduction polynomial and precomputed trace/Gram/dual-basis data; elements
are passed around as bare ints alongside the context.

Bulk helpers (xor_table, functional_table, exp/log, inverse tables) return
numpy arrays indexed by element encoding and back the fast transforms.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MIN_DEGREE = 2
MAX_DEGREE = 32

#: exp/log multiplication tables are built only up to this degree; above it
#: scalar products fall back to carry-less shift-and-reduce.
TABLE_DEGREE = 16

POLY_TABLE_ENV = "KSPECTRA_POLY_TABLE"


class ReduciblePolynomialError(ValueError):
    """Raised when a reduction polynomial factors over F_2."""

    def __init__(self, poly: int, factor: int):
        self.poly = poly
        self.factor = factor
        super().__init__(
            f"polynomial {poly:#x} is reducible over F_2 (factor {factor:#x})"
        )


# ---------------------------------------------------------------------------
# GF(2)[x] arithmetic on coefficient bitmasks
# ---------------------------------------------------------------------------

def pdeg(p: int) -> int:
    """Degree of the polynomial with coefficient mask p (deg 0 = -1 for p=0)."""
    return p.bit_length() - 1


def pmul(a: int, b: int) -> int:
    """Carry-less product of two coefficient masks."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
    return r


def pmod(a: int, m: int) -> int:
    """Remainder of a modulo m over F_2."""
    dm = pdeg(m)
    while a and pdeg(a) >= dm:
        a ^= m << (pdeg(a) - dm)
    return a


def pgcd(a: int, b: int) -> int:
    while b:
        a, b = b, pmod(a, b)
    return a


def psquare(a: int) -> int:
    """Square of a polynomial: bit i moves to bit 2i."""
    r = 0
    i = 0
    while a:
        if a & 1:
            r |= 1 << (2 * i)
        a >>= 1
        i += 1
    return r


def _x_pow_2k_mod(k: int, m: int) -> int:
    """x^(2^k) mod m."""
    s = pmod(2, m)
    for _ in range(k):
        s = pmod(psquare(s), m)
    return s


def _prime_factors(v: int) -> list[int]:
    out = []
    d = 2
    while d * d <= v:
        if v % d == 0:
            out.append(d)
            while v % d == 0:
                v //= d
        d += 1
    if v > 1:
        out.append(v)
    return out


def is_irreducible(poly: int) -> bool:
    """Irreducibility test over F_2 (Frobenius fixed-point criterion)."""
    n = pdeg(poly)
    if n < 1:
        return False
    if n == 1:
        return True
    if _x_pow_2k_mod(n, poly) != 2:
        return False
    for q in _prime_factors(n):
        if pgcd(_x_pow_2k_mod(n // q, poly) ^ 2, poly) != 1:
            return False
    return True


def find_factor(poly: int) -> int | None:
    """Smallest nontrivial factor of poly over F_2, or None if irreducible."""
    n = pdeg(poly)
    for m in range(2, 1 << (n // 2 + 1)):
        if pdeg(m) >= 1 and pmod(poly, m) == 0:
            return m
    return None


@lru_cache(maxsize=None)
def smallest_irreducible(n: int) -> int:
    """Lexicographically smallest irreducible polynomial of degree n."""
    top = 1 << n
    for c in range(top):
        p = top | c
        if is_irreducible(p):
            return p
    raise AssertionError(f"no irreducible of degree {n}")  # unreachable


def default_poly(n: int) -> int:
    """Default reduction polynomial for degree n, honouring the env override."""
    path = os.environ.get(POLY_TABLE_ENV)
    if path:
        table = _load_poly_table(path)
        if n in table:
            return table[n]
    return smallest_irreducible(n)


def _load_poly_table(path: str) -> dict[int, int]:
    table: dict[int, int] = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            deg, mask = line.split()
            table[int(deg)] = int(mask, 0)
    return table


# ---------------------------------------------------------------------------
# Small GF(2) matrix helpers (rows/columns as int bitmasks)
# ---------------------------------------------------------------------------

def transpose_bits(vecs: tuple[int, ...] | list[int], n: int) -> tuple[int, ...]:
    """Transpose a square bit matrix given as a list of n column (or row) masks."""
    out = [0] * n
    for j, v in enumerate(vecs):
        for i in range(n):
            if (v >> i) & 1:
                out[i] |= 1 << j
    return tuple(out)


def mat_inverse_rows(rows: tuple[int, ...] | list[int], n: int) -> tuple[int, ...]:
    """Invert an n x n bit matrix given by row masks; raises on singular input."""
    aug = [rows[i] | (1 << (n + i)) for i in range(n)]
    r = 0
    for col in range(n):
        piv = next((k for k in range(r, n) if (aug[k] >> col) & 1), None)
        if piv is None:
            raise ValueError("matrix is singular over F_2")
        aug[r], aug[piv] = aug[piv], aug[r]
        for k in range(n):
            if k != r and (aug[k] >> col) & 1:
                aug[k] ^= aug[r]
        r += 1
    mask = (1 << n) - 1
    return tuple((aug[i] >> n) & mask for i in range(n))


def nullspace_rows(rows: list[int], n: int) -> list[int]:
    """Basis of {x : parity(row & x) = 0 for all rows} inside F_2^n."""
    piv: dict[int, int] = {}
    for r in rows:
        while r:
            p = pdeg(r)
            if p in piv:
                r ^= piv[p]
            else:
                piv[p] = r
                break
    # back-substitute so each pivot bit appears in exactly one row
    for p in sorted(piv, reverse=True):
        for q in piv:
            if q != p and (piv[q] >> p) & 1:
                piv[q] ^= piv[p]
    basis = []
    pivots = set(piv)
    for f in range(n):
        if f in pivots:
            continue
        v = 1 << f
        for p, row in piv.items():
            if (row >> f) & 1:
                v |= 1 << p
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Bulk table primitives
# ---------------------------------------------------------------------------

def elem_dtype(n: int):
    return np.uint32 if n <= 31 else np.uint64


def xor_table(images, dtype=None) -> np.ndarray:
    """Table T of length 2^k with T[m] = XOR of images[i] over the set bits of m.

    With images = columns of a bit matrix this is the full truth table of the
    linear map; with images = a subspace basis it enumerates the span.
    """
    k = len(images)
    if dtype is None:
        dtype = np.uint32 if all(v < (1 << 31) for v in images) else np.uint64
    t = np.zeros(1 << k, dtype=dtype)
    for i, img in enumerate(images):
        t[1 << i: 2 << i] = t[: 1 << i] ^ dtype(img)
    return t


def functional_table(nbits: int, mask: int) -> np.ndarray:
    """Table of parity(m & mask) for m in [0, 2^nbits) as uint8."""
    t = np.zeros(1 << nbits, dtype=np.uint8)
    for i in range(nbits):
        t[1 << i: 2 << i] = t[: 1 << i] ^ np.uint8((mask >> i) & 1)
    return t


def parity_fold(arr: np.ndarray) -> np.ndarray:
    """Elementwise parity of the set bits of an unsigned integer array."""
    v = arr
    shift = arr.dtype.itemsize * 4
    while shift:
        v = v ^ (v >> shift)
        shift >>= 1
    return (v & 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# Field context
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldCtx:
    """Immutable description of F_2^n; safe to share across workers."""

    n: int
    poly: int
    trace_mask: int
    gram: tuple[int, ...]        # row i: bit j = Tr(basis_i * basis_j)
    gram_inv: tuple[int, ...]
    dual_basis: tuple[int, ...]  # Tr(dual_basis[i] * basis_j) = delta_ij
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self) -> int:
        return 1 << self.n

    # -- scalar arithmetic --------------------------------------------------

    def _mul_raw(self, a: int, b: int) -> int:
        return pmod(pmul(a, b), self.poly)

    def mul(self, a: int, b: int) -> int:
        """Field product; exp/log tables for small n, shift-and-reduce above."""
        if self.n <= TABLE_DEGREE:
            if a == 0 or b == 0:
                return 0
            exp2, log = self._scalar_tables()
            return exp2[log[a] + log[b]]
        return self._mul_raw(a, b)

    def sqr(self, a: int) -> int:
        return pmod(psquare(a), self.poly)

    def pow(self, a: int, e: int) -> int:
        r = 1
        a = pmod(a, self.poly)
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv0(self, a: int) -> int:
        """Multiplicative inverse extended by inv0(0) = 0."""
        if a == 0:
            return 0
        if self.n <= TABLE_DEGREE:
            exp2, log = self._scalar_tables()
            return exp2[(self.size - 1) - log[a]]
        return self.pow(a, self.size - 2)

    def trace(self, a: int) -> int:
        """Absolute trace to F_2."""
        return (a & self.trace_mask).bit_count() & 1

    def char_poly(self, a: int) -> int:
        """Coefficient mask of prod_{i<n} (x + a^(2^i)); always lands in F_2[x]."""
        coeffs = [1]
        c = a
        for _ in range(self.n):
            nxt = [self.mul(coeffs[0], c)]
            for k in range(1, len(coeffs)):
                nxt.append(coeffs[k - 1] ^ self.mul(coeffs[k], c))
            nxt.append(coeffs[-1])
            coeffs = nxt
            c = self.sqr(c)
        mask = 0
        for i, v in enumerate(coeffs):
            if v not in (0, 1):
                raise AssertionError("characteristic polynomial left F_2[x]")
            mask |= v << i
        return mask

    def subfield_elements(self, d: int) -> set[int]:
        """The 2^d solutions of a^(2^d) = a, i.e. the subfield F_2^d."""
        if d <= 0 or self.n % d != 0:
            raise ValueError(f"subfield degree {d} does not divide {self.n}")
        cols = []
        for i in range(self.n):
            v = 1 << i
            for _ in range(d):
                v = self.sqr(v)
            cols.append(v ^ (1 << i))
        rows = transpose_bits(cols, self.n)
        basis = nullspace_rows(list(rows), self.n)
        span = {0}
        for b in basis:
            span |= {s ^ b for s in span}
        if len(span) != 1 << d:
            raise AssertionError("subfield has wrong size")
        return span

    # -- cached tables --------------------------------------------------------

    def _scalar_tables(self):
        tabs = self._cache.get("scalar")
        if tabs is None:
            N = self.size
            g = self._generator()
            exp = [0] * (2 * (N - 1))
            log = [0] * N
            e = 1
            for j in range(N - 1):
                exp[j] = e
                exp[j + N - 1] = e
                log[e] = j
                e = self._mul_raw(e, g)
            if e != 1:
                raise AssertionError("generator order mismatch")
            tabs = (exp, log)
            self._cache["scalar"] = tabs
        return tabs

    def _generator(self) -> int:
        g = self._cache.get("generator")
        if g is None:
            N1 = self.size - 1
            qs = _prime_factors(N1)
            g = 2
            while True:
                if all(self._pow_raw(g, N1 // q) != 1 for q in qs):
                    break
                g += 1
            self._cache["generator"] = g
        return g

    def _pow_raw(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_raw(r, a)
            a = self._mul_raw(a, a)
            e >>= 1
        return r

    def mulx_vec(self, arr: np.ndarray) -> np.ndarray:
        """Multiply a whole element array by x, reducing modulo poly."""
        dt = arr.dtype.type
        wrap = (arr >> dt(self.n - 1)) & dt(1)
        return (arr << dt(1)) ^ wrap * dt(self.poly)

    def _mul_scalar_vec_raw(self, c: int, arr: np.ndarray) -> np.ndarray:
        res = np.zeros_like(arr)
        t = arr
        j = 0
        while c >> j:
            if (c >> j) & 1:
                res ^= t
            j += 1
            if c >> j:
                t = self.mulx_vec(t)
        return res

    def exp_log_tables(self) -> tuple[np.ndarray, np.ndarray]:
        """Numpy exp/log tables for the multiplicative group (any n <= 28ish)."""
        tabs = self._cache.get("exp_log")
        if tabs is None:
            N = self.size
            g = self._generator()
            dt = elem_dtype(self.n)
            exp = np.zeros(N - 1, dtype=dt)
            seed = min(N - 1, 1 << 12)
            e = 1
            for j in range(seed):
                exp[j] = e
                e = self._mul_raw(e, g)
            filled = seed
            while filled < N - 1:
                blk = min(filled, N - 1 - filled)
                c = self._pow_raw(g, filled)
                exp[filled:filled + blk] = self._mul_scalar_vec_raw(c, exp[:blk])
                filled += blk
            log = np.zeros(N, dtype=np.uint32)
            log[exp] = np.arange(N - 1, dtype=np.uint32)
            tabs = (exp, log)
            self._cache["exp_log"] = tabs
        return tabs

    def inverse_table(self) -> np.ndarray:
        """Table of inv0(x) for every x, built from the exp table."""
        inv = self._cache.get("inverse")
        if inv is None:
            exp, _ = self.exp_log_tables()
            inv = np.zeros(self.size, dtype=exp.dtype)
            rolled = np.empty_like(exp)
            rolled[0] = exp[0]
            rolled[1:] = exp[1:][::-1]
            inv[exp] = rolled
            inv.flags.writeable = False
            self._cache["inverse"] = inv
        return inv

    def trace_table(self) -> np.ndarray:
        t = self._cache.get("trace")
        if t is None:
            t = functional_table(self.n, self.trace_mask)
            t.flags.writeable = False
            self._cache["trace"] = t
        return t

    def dualenc_table(self) -> np.ndarray:
        """Table of G*x: coordinates of x in the dual basis, so that
        Tr(x*y) = parity(dualenc(x) & y)."""
        t = self._cache.get("dualenc")
        if t is None:
            t = xor_table(transpose_bits(self.gram, self.n), elem_dtype(self.n))
            t.flags.writeable = False
            self._cache["dualenc"] = t
        return t

    def frobenius_table(self) -> np.ndarray:
        t = self._cache.get("frobenius")
        if t is None:
            cols = [self.sqr(1 << i) for i in range(self.n)]
            t = xor_table(cols, elem_dtype(self.n))
            t.flags.writeable = False
            self._cache["frobenius"] = t
        return t

    def dualenc(self, x: int) -> int:
        """G*x as a scalar: Tr(x*y) = parity(dualenc(x) & y)."""
        out = 0
        for i in range(self.n):
            if (x >> i) & 1:
                out ^= self.gram[i]
        return out

    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise field product of two element arrays."""
        if self.n <= TABLE_DEGREE:
            exp, log = self.exp_log_tables()
            s = log[a].astype(np.int64) + log[b]
            s %= self.size - 1
            out = exp[s]
            out[(a == 0) | (b == 0)] = 0
            return out
        res = np.zeros_like(b)
        t = b.copy()
        dt = b.dtype.type
        for j in range(self.n):
            res ^= (((a >> dt(j)) & dt(1)) * t)
            if j + 1 < self.n:
                t = self.mulx_vec(t)
        return res

    def mul_scalar_vec(self, c: int, arr: np.ndarray) -> np.ndarray:
        """Field product of a scalar with every entry of an element array."""
        if c == 0:
            return np.zeros_like(arr)
        if c == 1:
            return arr.copy()
        if self.n <= TABLE_DEGREE:
            exp, log = self.exp_log_tables()
            s = log[arr].astype(np.int64) + int(log[c])
            s %= self.size - 1
            out = exp[s]
            out[arr == 0] = 0
            return out
        return self._mul_scalar_vec_raw(c, arr)


def mk_field(n: int, poly: int | None = None) -> FieldCtx:
    """Build a FieldCtx for F_2^n, verifying the reduction polynomial."""
    if not MIN_DEGREE <= n <= MAX_DEGREE:
        raise ValueError(f"degree {n} outside supported range {MIN_DEGREE}..{MAX_DEGREE}")
    if poly is None:
        poly = default_poly(n)
    if pdeg(poly) != n:
        raise ValueError(f"polynomial {poly:#x} does not have degree {n}")
    if not is_irreducible(poly):
        factor = find_factor(poly)
        raise ReduciblePolynomialError(poly, factor)

    def mul(a, b):
        return pmod(pmul(a, b), poly)

    def tr(a):
        acc = 0
        c = a
        for _ in range(n):
            acc ^= c
            c = pmod(psquare(c), poly)
        if acc not in (0, 1):
            raise AssertionError("trace left F_2")
        return acc

    trace_mask = 0
    for i in range(n):
        trace_mask |= tr(1 << i) << i
    gram = []
    for i in range(n):
        row = 0
        for j in range(n):
            row |= tr(mul(1 << i, 1 << j)) << j
        gram.append(row)
    gram = tuple(gram)
    gram_inv = mat_inverse_rows(gram, n)  # trace form is non-degenerate
    dual_basis = gram_inv  # row i of G^-1 holds the coordinates of d_i
    for i in range(n):
        for j in range(n):
            if tr(mul(dual_basis[i], 1 << j)) != (1 if i == j else 0):
                raise AssertionError("dual basis construction failed")
    return FieldCtx(n=n, poly=poly, trace_mask=trace_mask, gram=gram,
                    gram_inv=gram_inv, dual_basis=tuple(dual_basis))
