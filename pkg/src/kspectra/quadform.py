"""The trace-zero-hyperplane quadratic form: restriction, radical, classification.

The form q(x) = sum_{0<=i<j<n} x^(2^i+2^j) takes values in F_2 (it is the
x^(n-2) coefficient of the characteristic polynomial) and polarizes to
B(x,y) = Tr(xy) + Tr(x)Tr(y).  Restrictions to subspaces are tabulated with
an xor-doubling pass driven by basis values and the polarization, classified
by zero counting, and searched for totally isotropic subspaces.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kspectra.gf2n import FieldCtx, functional_table, parity_fold, pdeg
from kspectra.linmap import SubspaceBasis, orthogonal_complement, rref, subspace_from_vectors
from kspectra.gf2n import nullspace_rows

HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
ELLIPTIC = "elliptic"


class NotQuadraticFormError(ValueError):
    """The supplied evaluator does not polarize to a bilinear form."""


class InconsistentFormError(ValueError):
    """Zero count matches no quadratic-form type for the given radical."""


def q_eval(ctx: FieldCtx, a: int) -> int:
    """Definitional sum over all conjugate pairs; lands in {0, 1}."""
    conj = [a]
    for _ in range(ctx.n - 1):
        conj.append(ctx.sqr(conj[-1]))
    acc = 0
    for i in range(ctx.n):
        for j in range(i + 1, ctx.n):
            acc ^= ctx.mul(conj[i], conj[j])
    if acc not in (0, 1):
        raise AssertionError("quadratic form left F_2")
    return acc


def bilinear_eval(ctx: FieldCtx, x: int, y: int) -> int:
    """Polarization of q in closed form: Tr(xy) + Tr(x)Tr(y)."""
    return ctx.trace(ctx.mul(x, y)) ^ (ctx.trace(x) & ctx.trace(y))


def q_table(ctx: FieldCtx) -> np.ndarray:
    """q on the whole field as uint8, built by the polarization doubling pass."""
    t = ctx._cache.get("q_table")
    if t is None:
        n = ctx.n
        qb = [q_eval(ctx, 1 << i) for i in range(n)]
        tr = ctx.trace_mask
        masks = [ctx.gram[i] ^ (tr if (tr >> i) & 1 else 0) for i in range(n)]
        t = np.zeros(1 << n, dtype=np.uint8)
        for i in range(n):
            low = masks[i] & ((1 << i) - 1)
            t[1 << i: 2 << i] = t[: 1 << i] ^ np.uint8(qb[i]) ^ functional_table(i, low)
        t.flags.writeable = False
        ctx._cache["q_table"] = t
    return t


def hyperplane_H(ctx: FieldCtx) -> SubspaceBasis:
    """Canonical basis of the trace-zero hyperplane {x : Tr(x) = 0}."""
    return orthogonal_complement(ctx, subspace_from_vectors(ctx.n, [1]))


@dataclass(frozen=True)
class QuadFormRec:
    """A quadratic form on a subspace with radical, type and Witt index."""

    n: int                       # ambient field degree
    basis: tuple[int, ...]       # subspace basis inside F_2^n
    eval: np.ndarray             # uint8 truth table over coordinate masks
    bmat: tuple[int, ...]        # row i: bit j = B(basis_j, basis_i)
    fvals: tuple[int, ...]       # form on the basis vectors
    radical_coords: tuple[int, ...]
    radical_basis: SubspaceBasis
    form_type: str
    witt_index: int
    lam: int

    @property
    def m(self) -> int:
        return len(self.basis)

    def embed(self, coord_mask: int) -> int:
        """Coordinate mask -> ambient element."""
        out = 0
        i = 0
        while coord_mask >> i:
            if (coord_mask >> i) & 1:
                out ^= self.basis[i]
            i += 1
        return out


def _form_table(m: int, fvals, bmat) -> np.ndarray:
    ev = np.zeros(1 << m, dtype=np.uint8)
    for i in range(m):
        low = bmat[i] & ((1 << i) - 1)
        ev[1 << i: 2 << i] = ev[: 1 << i] ^ np.uint8(fvals[i]) ^ functional_table(i, low)
    return ev


def _radical_coords(m: int, bmat, ev) -> tuple[int, ...]:
    """{y in rad(B) : f(y) = 0} as canonical coordinate masks."""
    rad_b = nullspace_rows(list(bmat), m)
    # f is linear on rad(B), so filter by combining f=1 vectors pairwise
    ones = [v for v in rad_b if ev[v]]
    zeros = [v for v in rad_b if not ev[v]]
    if ones:
        w0 = ones[0]
        zeros.extend(w0 ^ v for v in ones[1:])
    return rref(zeros)


def _classify_counts(m: int, w: int, nzeros: int) -> tuple[str, int, int]:
    """Invert N = 2^(m-1) + lam * 2^((m+w-2)/2) for lam in {-1, 0, +1}."""
    if m == 0:
        return HYPERBOLIC, 0, 1
    half = 1 << (m - 1)
    if (m + w) % 2 == 1:
        if nzeros != half:
            raise InconsistentFormError(
                f"count {nzeros} incompatible with parabolic type (m={m}, w={w})"
            )
        lam = 0
        form_type = PARABOLIC
    else:
        step = 1 << ((m + w - 2) // 2)
        if nzeros == half + step:
            lam, form_type = 1, HYPERBOLIC
        elif nzeros == half - step:
            lam, form_type = -1, ELLIPTIC
        else:
            raise InconsistentFormError(
                f"count {nzeros} matches no type (m={m}, w={w})"
            )
    v = (m - w) // 2
    witt = v - 1 if lam < 0 else v
    return form_type, witt, lam


def restrict(ctx: FieldCtx, f, S: SubspaceBasis, validate: bool = True) -> QuadFormRec:
    """Tabulate the form f on the subspace S and classify it.

    f is any evaluator over ambient elements; it must be a quadratic form
    (f(0) = 0, bilinear polarization), which is spot-checked on coordinate
    triples and random points unless validate is disabled.
    """
    basis = S.vectors
    m = len(basis)
    if f(0) != 0:
        raise NotQuadraticFormError("f(0) != 0")
    fvals = tuple(int(f(s)) & 1 for s in basis)
    bmat = [0] * m
    for i in range(m):
        for j in range(i):
            b = (fvals[i] ^ fvals[j] ^ int(f(basis[i] ^ basis[j]))) & 1
            bmat[i] |= b << j
            bmat[j] |= b << i
    bmat = tuple(bmat)
    ev = _form_table(m, fvals, bmat)
    if validate:
        _validate_form(f, basis, ev, m)
    rad = _radical_coords(m, bmat, ev)
    nzeros = (1 << m) - int(ev.sum())
    form_type, witt, lam = _classify_counts(m, len(rad), nzeros)
    emb = lambda c: _embed(basis, c)
    rad_ambient = subspace_from_vectors(ctx.n, [emb(c) for c in rad])
    ev.flags.writeable = False
    return QuadFormRec(
        n=ctx.n, basis=basis, eval=ev, bmat=bmat, fvals=fvals,
        radical_coords=rad, radical_basis=rad_ambient,
        form_type=form_type, witt_index=witt, lam=lam,
    )


def _embed(basis, coord_mask: int) -> int:
    out = 0
    i = 0
    while coord_mask >> i:
        if (coord_mask >> i) & 1:
            out ^= basis[i]
        i += 1
    return out


def _validate_form(f, basis, ev, m: int, samples: int = 64, triples: int = 512):
    rng = np.random.default_rng(0xF0F0)
    if m >= 3:
        idx = [(i, j, k) for i in range(m) for j in range(i + 1, m) for k in range(j + 1, m)]
        if len(idx) > triples:
            sel = rng.choice(len(idx), size=triples, replace=False)
            idx = [idx[int(s)] for s in sel]
        for i, j, k in idx:
            c = (1 << i) | (1 << j) | (1 << k)
            if int(ev[c]) != int(f(_embed(basis, c))) & 1:
                raise NotQuadraticFormError("polarization is not bilinear")
    for c in rng.integers(0, 1 << m, size=min(samples, 1 << m)):
        if int(ev[int(c)]) != int(f(_embed(basis, int(c)))) & 1:
            raise NotQuadraticFormError("evaluator disagrees with quadratic table")


def restrict_q_to_h(ctx: FieldCtx, validate: bool = True) -> QuadFormRec:
    """The canonical object of study: q restricted to the trace-zero hyperplane."""
    qt = q_table(ctx)
    return restrict(ctx, lambda x: int(qt[x]), hyperplane_H(ctx), validate=validate)


def radical(qf: QuadFormRec) -> SubspaceBasis:
    """Recompute {y in rad(B_f) : f(y) = 0} as an ambient canonical basis."""
    rad = _radical_coords(qf.m, qf.bmat, qf.eval)
    return subspace_from_vectors(qf.n, [qf.embed(c) for c in rad])


def classify(qf: QuadFormRec) -> tuple[str, int, int]:
    """(type, Witt index, lambda) from the zero count; raises if inconsistent."""
    return _classify_counts(qf.m, len(qf.radical_coords), count_zeros(qf))


def count_zeros(qf: QuadFormRec) -> int:
    return (1 << qf.m) - int(qf.eval.sum())


def max_isotropic_dim(qf: QuadFormRec) -> int:
    """Largest dimension of a totally isotropic subspace: Witt index + radical."""
    return qf.witt_index + len(qf.radical_coords)


def expected_h_zero_count(n: int) -> int:
    """Closed-form count of {x : Tr(x) = 0, q(x) = 0}: 2^(n-2) + e."""
    if n < 3:
        raise ValueError("count formula needs n >= 3")
    r = n % 8
    if r == 0:
        e = -(1 << ((n - 2) // 2))
    elif r in (1, 7):
        e = 1 << ((n - 3) // 2)
    elif r in (2, 6):
        e = 0
    elif r in (3, 5):
        e = -(1 << ((n - 3) // 2))
    else:  # r == 4
        e = 1 << ((n - 2) // 2)
    return (1 << (n - 2)) + e


def find_isotropic_subspace(qf: QuadFormRec, target_dim: int) -> SubspaceBasis:
    """A totally isotropic subspace of the requested dimension.

    Greedy extension with backtracking over coordinate masks in increasing
    encoded order: a candidate must vanish under f and be B-orthogonal to the
    current basis, which makes the whole span isotropic.  Deterministic.
    """
    if target_dim < 0 or target_dim > max_isotropic_dim(qf):
        raise ValueError(
            f"target {target_dim} exceeds the maximal isotropic dimension "
            f"{max_isotropic_dim(qf)}"
        )
    cands = np.flatnonzero(qf.eval == 0).astype(np.uint32)[1:]  # drop 0

    def bdot_mask(e: int) -> int:
        out = 0
        for i in range(qf.m):
            out |= ((qf.bmat[i] & e).bit_count() & 1) << i
        return out

    def dfs(chosen: list[int], pool: np.ndarray):
        if len(chosen) == target_dim:
            return chosen
        for idx in range(pool.shape[0]):
            v = int(pool[idx])
            p = pdeg(v)
            rest = pool[idx + 1:]
            rest = rest[(rest >> (p + 1)) > 0]
            rest = rest[((rest >> p) & 1) == 0]
            bv = bdot_mask(v)
            if bv:
                rest = rest[parity_fold(rest & np.uint32(bv)) == 0]
            got = dfs(chosen + [v], rest)
            if got is not None:
                return got
        return None

    got = dfs([], cands)
    if got is None:
        raise AssertionError("isotropic search failed below the proven bound")
    basis = subspace_from_vectors(qf.n, [qf.embed(c) for c in got])
    span = basis.span()
    for x in span:  # postcondition replay
        if int(qf.eval[_coords_of(qf, int(x))]):
            raise AssertionError("returned span is not isotropic")
    return basis


def _coords_of(qf: QuadFormRec, x: int) -> int:
    """Ambient element -> coordinate mask w.r.t. qf.basis (must be in the span)."""
    c = 0
    for i in reversed(range(qf.m)):
        if pdeg(x) == pdeg(qf.basis[i]):
            x ^= qf.basis[i]
            c |= 1 << i
    if x:
        raise ValueError("element outside the subspace")
    return c
