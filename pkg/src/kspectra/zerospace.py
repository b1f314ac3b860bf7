"""Subspaces inside the Kloosterman-zero and mod-16 sets: bounds and searches.

The search enumerates subspaces by their unique reduced-echelon basis in
increasing leading-bit order, pruning candidates with a membership bitset and
(optionally) trace-orthogonality, so each subspace is visited exactly once
and node counts are reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kspectra.gf2n import FieldCtx, parity_fold, pdeg
from kspectra.linmap import SubspaceBasis, orthogonal_complement, subspace_from_vectors
from kspectra.quadform import q_table
from kspectra.spectra import Spectrum, kloosterman_spectrum, kloosterman_zeros


def zero_subspace_bound(n: int) -> int:
    """Dimension bound for subspaces of Kloosterman zeros (n >= 5)."""
    if n < 5:
        raise ValueError("zero-subspace bound needs n >= 5")
    r = n % 8
    if r in (0, 2, 4, 6):
        return (n - 2) // 2
    if r in (1, 7):
        return (n - 1) // 2
    return (n - 3) // 2


def mod16_subspace_bound(n: int) -> int:
    """Dimension bound for subspaces with all sums divisible by 16 (n >= 5)."""
    if n < 5:
        raise ValueError("mod16-subspace bound needs n >= 5")
    r = n % 8
    if r in (0, 2, 6):
        return (n - 2) // 2
    if r in (1, 7):
        return (n - 1) // 2
    if r in (3, 5):
        return (n - 3) // 2
    return n // 2  # r == 4


def weil_subspace_bound(n: int) -> int:
    """Weaker comparison bound floor(n/2) + 1 from the exponential-sum estimate."""
    if n < 3:
        raise ValueError("comparison bound needs n >= 3")
    return n // 2 + 1


def mod16_set(ctx: FieldCtx) -> set[int]:
    """{a : Tr(a) = 0 and q(a) = 0}, computed without any Kloosterman sums."""
    return set(int(v) for v in mod16_members(ctx))


def mod16_members(ctx: FieldCtx) -> np.ndarray:
    if ctx.n < 4:
        raise ValueError("mod16 characterization needs n >= 4")
    tr = ctx.trace_table()
    qt = q_table(ctx)
    return np.flatnonzero((tr == 0) & (qt == 0)).astype(np.uint32)


@dataclass(frozen=True)
class ZeroSpaceReport:
    n: int
    target_set: str
    best_basis: SubspaceBasis
    best_dim: int
    bound: int | None
    nodes_visited: int
    exhaustive: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "target_set": self.target_set,
            "best_dim": self.best_dim,
            "best_basis": [hex(v) for v in self.best_basis.vectors],
            "bound": self.bound,
            "nodes_visited": self.nodes_visited,
            "exhaustive": self.exhaustive,
        }


def max_subspace_in_set(
    ctx: FieldCtx,
    S,
    *,
    prune_isotropic: bool = False,
    bound: int | None = None,
    node_budget: int | None = None,
    label: str = "custom",
) -> ZeroSpaceReport:
    """Maximum-dimension subspace whose nonzero elements all lie in S.

    Depth-first canonical extension; 0 is handled implicitly (membership is
    only required of nonzero span elements).  Stops early once the supplied
    bound is attained (it cannot be beaten); a node budget yields a
    non-exhaustive report instead.
    """
    if isinstance(S, np.ndarray):
        members = np.unique(S).astype(np.uint32)
    else:
        members = np.array(sorted({int(s) for s in S}), dtype=np.uint32)
    members = members[members > 0]
    mask = np.zeros(ctx.size, dtype=bool)
    mask[members] = True

    state = {"best": [], "nodes": 0, "truncated": False, "stop": False}

    def dfs(basis: list[int], span: np.ndarray, pool: np.ndarray) -> None:
        if len(basis) > len(state["best"]):
            state["best"] = list(basis)
            if bound is not None and len(basis) >= bound:
                state["stop"] = True
                return
        for idx in range(pool.shape[0]):
            if state["stop"]:
                return
            if node_budget is not None and state["nodes"] >= node_budget:
                state["truncated"] = True
                return
            v = int(pool[idx])
            state["nodes"] += 1
            p = pdeg(v)
            rest = pool[idx + 1:]
            rest = rest[(rest >> np.uint32(p + 1)) > 0]
            rest = rest[((rest >> np.uint32(p)) & 1) == 0]
            added = span ^ np.uint32(v)
            for u in added:
                if rest.size == 0:
                    break
                rest = rest[mask[rest ^ u]]
            if prune_isotropic and rest.size:
                pe = ctx.dualenc(v)
                rest = rest[parity_fold(rest & np.uint32(pe)) == 0]
            dfs(basis + [v], np.concatenate([span, added]), rest)
            if state["stop"] or state["truncated"]:
                return

    dfs([], np.zeros(1, dtype=np.uint32), members)
    best = subspace_from_vectors(ctx.n, state["best"])
    return ZeroSpaceReport(
        n=ctx.n,
        target_set=label,
        best_basis=best,
        best_dim=best.dim,
        bound=bound,
        nodes_visited=state["nodes"],
        exhaustive=not state["truncated"],
    )


def max_zero_subspace(
    ctx: FieldCtx,
    *,
    prune_isotropic: bool = True,
    node_budget: int | None = None,
    stop_at_bound: bool = True,
) -> ZeroSpaceReport:
    """Search the Kloosterman-zero set; dimension is capped by the proven bound."""
    zeros = kloosterman_zeros(ctx)
    bound = zero_subspace_bound(ctx.n) if stop_at_bound else None
    return max_subspace_in_set(
        ctx, zeros, prune_isotropic=prune_isotropic, bound=bound,
        node_budget=node_budget, label="zeros",
    )


def max_mod16_subspace(
    ctx: FieldCtx,
    *,
    node_budget: int | None = None,
    stop_at_bound: bool = True,
) -> ZeroSpaceReport:
    """Search {Tr = 0, q = 0}; the proven bound is attained (sharp)."""
    members = mod16_members(ctx)
    bound = mod16_subspace_bound(ctx.n) if stop_at_bound else None
    return max_subspace_in_set(
        ctx, members, bound=bound, node_budget=node_budget, label="mod16",
    )


def subspace_sum_identity(ctx: FieldCtx, V: SubspaceBasis, spectrum: Spectrum | None = None) -> tuple[int, int]:
    """Both sides of the subspace summation identity, exactly.

    lhs = sum_{a in V} ((K(a) - 1)^2 - 1) = sum (K(a)^2 - 2K(a));
    rhs = 2^(n+k) - 2^(n+1) + 2^k * sum_{u in V-perp} K(u^-1), with 0^-1 = 0.

    The -1 shift inside the square is forced by the x = 0 term of the
    0-extended sums; on subspaces of Kloosterman zeros both sides are 0.
    Verified exhaustively over every subspace of F_2^5.
    """
    spec = spectrum if spectrum is not None else kloosterman_spectrum(ctx)
    K = spec.data
    k = V.dim
    span = V.span()
    kv = K[span]
    lhs = int(np.sum(kv * kv - 2 * kv))
    W = orthogonal_complement(ctx, V)
    inv = ctx.inverse_table()
    rhs_sum = int(np.sum(K[inv[W.span()]]))
    rhs = (1 << (ctx.n + k)) - (1 << (ctx.n + 1)) + (1 << k) * rhs_sum
    return lhs, rhs
