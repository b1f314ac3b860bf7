"""F_2-linear self-maps of F_2^n and canonical subspace bases.

Maps are stored as tuples of column masks (column i = image of basis
element x^i); subspaces as reduced-echelon bases with strictly increasing
leading-bit positions, which makes the representation unique per subspace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kspectra.gf2n import (
    FieldCtx,
    elem_dtype,
    mat_inverse_rows,
    nullspace_rows,
    pdeg,
    transpose_bits,
    xor_table,
)


@dataclass(frozen=True)
class LinMap:
    """An F_2-linear map of F_2^n given by its column masks."""

    n: int
    cols: tuple[int, ...]

    def __call__(self, x: int) -> int:
        out = 0
        i = 0
        while x >> i:
            if (x >> i) & 1:
                out ^= self.cols[i]
            i += 1
        return out

    @property
    def rows(self) -> tuple[int, ...]:
        return transpose_bits(self.cols, self.n)

    def is_zero(self) -> bool:
        return not any(self.cols)

    def truth_table(self) -> np.ndarray:
        """Images of all 2^n points, indexed by element encoding."""
        return xor_table(self.cols, elem_dtype(self.n))


@dataclass(frozen=True)
class SubspaceBasis:
    """Canonical (reduced echelon, ascending leading bits) subspace basis."""

    n: int
    vectors: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def span(self) -> np.ndarray:
        return xor_table(self.vectors, elem_dtype(self.n))

    def span_set(self) -> set[int]:
        return set(int(v) for v in self.span())

    def contains(self, x: int) -> bool:
        for v in reversed(self.vectors):
            if pdeg(x) == pdeg(v):
                x ^= v
        return x == 0


def rref(vectors) -> tuple[int, ...]:
    """Reduced echelon form with leading (highest) bits as pivots."""
    piv: dict[int, int] = {}
    for v in vectors:
        v = int(v)
        while v:
            p = pdeg(v)
            if p in piv:
                v ^= piv[p]
            else:
                piv[p] = v
                break
    for p in sorted(piv, reverse=True):
        for q in list(piv):
            if q != p and (piv[q] >> p) & 1:
                piv[q] ^= piv[p]
    return tuple(piv[p] for p in sorted(piv))


def subspace_from_vectors(n: int, vectors) -> SubspaceBasis:
    return SubspaceBasis(n, rref(vectors))


def identity_map(n: int) -> LinMap:
    return LinMap(n, tuple(1 << i for i in range(n)))


def zero_map(n: int) -> LinMap:
    return LinMap(n, (0,) * n)


def from_matrix_rows(n: int, rows) -> LinMap:
    return LinMap(n, transpose_bits(tuple(rows), n))


def scalar_map(ctx: FieldCtx, c: int) -> LinMap:
    """The multiplication-by-c map."""
    return LinMap(ctx.n, tuple(ctx.mul(c, 1 << i) for i in range(ctx.n)))


def from_linearized(ctx: FieldCtx, coeffs) -> LinMap:
    """Map x -> sum_i coeffs[i] * x^(2^i) as a matrix."""
    coeffs = list(coeffs)
    if len(coeffs) > ctx.n:
        raise ValueError("too many linearized coefficients")
    cols = []
    for j in range(ctx.n):
        img = 0
        b = 1 << j
        for c in coeffs:
            img ^= ctx.mul(c, b)
            b = ctx.sqr(b)
        cols.append(img)
    return LinMap(ctx.n, tuple(cols))


def apply(L: LinMap, x: int) -> int:
    return L(x)


def compose(L1: LinMap, L2: LinMap) -> LinMap:
    """L1 after L2 (matrix product L1*L2)."""
    if L1.n != L2.n:
        raise ValueError("degree mismatch")
    return LinMap(L1.n, tuple(L1(c) for c in L2.cols))


def add(L1: LinMap, L2: LinMap) -> LinMap:
    if L1.n != L2.n:
        raise ValueError("degree mismatch")
    return LinMap(L1.n, tuple(a ^ b for a, b in zip(L1.cols, L2.cols)))


def adjoint(ctx: FieldCtx, L: LinMap) -> LinMap:
    """The unique L* with Tr(L(x)*y) = Tr(x*L*(y)), i.e. G^-1 * M^T * G."""
    mt = transpose_bits(L.cols, ctx.n)  # columns of M^T
    ginv = LinMap(ctx.n, tuple(ctx.gram_inv))  # symmetric: rows = columns
    g = LinMap(ctx.n, tuple(ctx.gram))
    return compose(ginv, compose(LinMap(ctx.n, mt), g))


def kernel(L: LinMap) -> SubspaceBasis:
    """Canonical basis of {x : L(x) = 0}."""
    rows = transpose_bits(L.cols, L.n)
    return subspace_from_vectors(L.n, nullspace_rows(list(rows), L.n))


def image_basis(L: LinMap) -> SubspaceBasis:
    """Canonical basis of the column space."""
    return subspace_from_vectors(L.n, L.cols)


def rank(L: LinMap) -> int:
    return len(rref(L.cols))


def kernel_dim(L: LinMap) -> int:
    return L.n - rank(L)


def orthogonal_complement(ctx: FieldCtx, V: SubspaceBasis) -> SubspaceBasis:
    """V-perp under the trace form Tr(xy)."""
    rows = [ctx.dualenc(v) for v in V.vectors]
    return subspace_from_vectors(ctx.n, nullspace_rows(rows, ctx.n))


def kernel_intersection(L1: LinMap, L2: LinMap) -> SubspaceBasis:
    rows = list(transpose_bits(L1.cols, L1.n)) + list(transpose_bits(L2.cols, L2.n))
    return subspace_from_vectors(L1.n, nullspace_rows(rows, L1.n))


def invert_map(L: LinMap) -> LinMap:
    """Inverse of a bijective map; raises on singular input."""
    rows = mat_inverse_rows(L.rows, L.n)
    return from_matrix_rows(L.n, rows)


def linearized_coeffs(ctx: FieldCtx, L: LinMap) -> tuple[int, ...]:
    """Solve for c_0..c_{n-1} with L(x) = sum c_i x^(2^i).

    Gaussian elimination over the field on the system given by the images of
    the polynomial basis; every linear map has exactly one such expression.
    """
    n = ctx.n
    # A[j][i] = (x^j)^(2^i), rhs[j] = L(x^j)
    A = [[0] * n for _ in range(n)]
    for j in range(n):
        b = 1 << j
        for i in range(n):
            A[j][i] = b
            b = ctx.sqr(b)
    rhs = [L(1 << j) for j in range(n)]
    perm = list(range(n))
    for col in range(n):
        piv = next(r for r in range(col, n) if A[perm[r]][col] != 0)
        perm[col], perm[piv] = perm[piv], perm[col]
        pr = perm[col]
        inv = ctx.inv0(A[pr][col])
        A[pr] = [ctx.mul(inv, v) for v in A[pr]]
        rhs[pr] = ctx.mul(inv, rhs[pr])
        for r in range(n):
            tr_ = perm[r]
            if tr_ != pr and A[tr_][col] != 0:
                f = A[tr_][col]
                A[tr_] = [v ^ ctx.mul(f, w) for v, w in zip(A[tr_], A[pr])]
                rhs[tr_] ^= ctx.mul(f, rhs[pr])
    return tuple(rhs[perm[i]] for i in range(n))


def random_map(rng: np.random.Generator, n: int) -> LinMap:
    """Uniform over all n x n bit matrices (not conditioned on invertibility)."""
    return LinMap(n, tuple(int(v) for v in rng.integers(0, 1 << n, n)))


def random_bijective_map(rng: np.random.Generator, n: int) -> LinMap:
    while True:
        L = random_map(rng, n)
        if rank(L) == n:
            return L


def random_subspace(rng: np.random.Generator, n: int, dim: int) -> SubspaceBasis:
    """Uniform-ish random subspace of the requested dimension."""
    if not 0 <= dim <= n:
        raise ValueError("dimension out of range")
    vecs: list[int] = []
    while len(rref(vecs)) < dim:
        vecs.append(int(rng.integers(1, 1 << n)))
        vecs = list(rref(vecs))
    return SubspaceBasis(n, tuple(vecs))


def map_to_json(ctx: FieldCtx, L: LinMap, with_linearized: bool = True) -> dict:
    out = {
        "n": L.n,
        "matrix_rows": [hex(r) for r in L.rows],
        "linearized": None,
    }
    if with_linearized:
        out["linearized"] = [hex(c) for c in linearized_coeffs(ctx, L)]
    return out


def map_from_json(ctx: FieldCtx, obj: dict) -> LinMap:
    n = int(obj["n"])
    if n != ctx.n:
        raise ValueError(f"map degree {n} does not match field degree {ctx.n}")
    rows = [int(r, 0) if isinstance(r, str) else int(r) for r in obj["matrix_rows"]]
    if len(rows) != n or any(r >> n for r in rows):
        raise ValueError("matrix_rows must be n masks of n bits")
    L = from_matrix_rows(n, rows)
    lin = obj.get("linearized")
    if lin is not None:
        coeffs = [int(c, 0) if isinstance(c, str) else int(c) for c in lin]
        M = from_linearized(ctx, coeffs)
        if M.cols != L.cols:  # checked on a basis by construction
            raise ValueError("matrix and linearized coefficients disagree")
    return L
