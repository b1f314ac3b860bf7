"""Bijectivity of L1(x^-1) + L2(x): direct evaluation vs. the spectral criterion.

The spectral route decides bijectivity from the adjoint maps alone: the
composite is a permutation iff ker(L1*) and ker(L2*) meet trivially and every
product L1*(b)*L2*(b) is a Kloosterman zero.  Exhaustive and randomized
searches below lean on cheap spectral probes and confirm survivors by direct
evaluation, so the two routes stay independent.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from kspectra.gf2n import FieldCtx, mk_field, pdeg
from kspectra.linmap import (
    LinMap,
    adjoint,
    kernel_dim,
    kernel_intersection,
)
from kspectra.spectra import Spectrum, TruthTable, kloosterman_spectrum
from kspectra.zerospace import zero_subspace_bound

#: fast-reject probe points: the first 8 nonzero field elements
PROBE_BS = (1, 2, 3, 4, 5, 6, 7, 8)


@dataclass(frozen=True)
class PermReport:
    is_perm: bool
    witness: tuple | None  # ("collision", x1, x2) | ("spectral_b", b) | ("kernel_overlap", v)
    method: str            # direct | spectral

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {"kind": self.witness[0],
                 "args": [hex(v) for v in self.witness[1:]]}
        return {"is_perm": self.is_perm, "witness": w, "method": self.method}


def _report_from_values(values: np.ndarray) -> PermReport:
    order = np.argsort(values, kind="stable")
    sv = values[order]
    dup = np.flatnonzero(sv[1:] == sv[:-1])
    if dup.size == 0:
        return PermReport(True, None, "direct")
    seconds = order[dup + 1]
    j = int(np.argmin(seconds))  # first collision in scan order
    return PermReport(False, ("collision", int(order[dup[j]]), int(seconds[j])), "direct")


def is_permutation(ctx: FieldCtx, F: TruthTable) -> PermReport:
    """Surjectivity check with a first-found collision witness."""
    if F.n != ctx.n:
        raise ValueError("truth table degree mismatch")
    return _report_from_values(F.values)


def compose_truth_table(ctx: FieldCtx, L1: LinMap, L2: LinMap) -> np.ndarray:
    """Values of x -> L1(x^-1) + L2(x) over the whole field."""
    inv = ctx.inverse_table()
    return L1.truth_table()[inv] ^ L2.truth_table()


def perm_direct(ctx: FieldCtx, L1: LinMap, L2: LinMap) -> PermReport:
    """Evaluate L1(x^-1) + L2(x) everywhere and test bijectivity."""
    return _report_from_values(compose_truth_table(ctx, L1, L2))


def perm_spectral(ctx: FieldCtx, L1: LinMap, L2: LinMap,
                  spectrum: Spectrum | None = None) -> PermReport:
    """Decide bijectivity from adjoint kernels and Kloosterman values only.

    Kernel witness takes priority; then b scans in increasing encoded value.
    """
    spec = spectrum if spectrum is not None else kloosterman_spectrum(ctx)
    A1 = adjoint(ctx, L1)
    A2 = adjoint(ctx, L2)
    inter = kernel_intersection(A1, A2)
    if inter.dim > 0:
        return PermReport(False, ("kernel_overlap", inter.vectors[0]), "spectral")
    prods = ctx.mul_vec(A1.truth_table(), A2.truth_table())
    bad = spec.data[prods] != 0
    if bad.any():
        return PermReport(False, ("spectral_b", int(np.argmax(bad))), "spectral")
    return PermReport(True, None, "spectral")


def perm_general_spectral(ctx: FieldCtx, F: TruthTable, L1: LinMap, L2: LinMap) -> bool:
    """Walsh criterion for L1(F(x)) + L2(x): all rows at (L1*(b), L2*(b)) vanish."""
    A1 = adjoint(ctx, L1)
    A2 = adjoint(ctx, L2)
    tr = ctx.trace_table()
    idx = np.arange(ctx.size, dtype=F.values.dtype)
    for b in range(1, ctx.size):
        s = tr[ctx.mul_scalar_vec(A1(b), F.values)] ^ tr[ctx.mul_scalar_vec(A2(b), idx)]
        if ctx.size - 2 * int(s.sum()) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Exhaustive sweep over x^-1 + L(x)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepReport:
    n: int
    candidates_checked: int
    permutations_found: tuple[LinMap, ...]
    wall_time_s: float
    jobs: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "candidates_checked": self.candidates_checked,
            "permutations_found": [
                {"matrix_cols": [hex(c) for c in L.cols]} for L in self.permutations_found
            ],
            "wall_time": self.wall_time_s,
            "jobs": self.jobs,
        }


def _sweep_range(n: int, poly: int, c0_values: list[int]) -> tuple[int, list[tuple[int, ...]]]:
    """Scan all matrices of L* whose first column lies in c0_values.

    Enumerating in adjoint space makes every probe K(b * A(b)) a pair of
    table lookups; a probe failing at a column prefix rejects the whole
    subtree at once (every completion fails that same probe), so the count
    advances by the subtree size.  Survivors are confirmed by direct
    evaluation of x^-1 + L(x).
    """
    ctx = mk_field(n, poly)
    N = ctx.size
    spec = kloosterman_spectrum(ctx)
    kz = [bool(spec.data[a] == 0) for a in range(N)]
    mul = [[ctx.mul(a, b) for b in range(N)] for a in range(N)]
    inv = [ctx.inv0(x) for x in range(N)]
    probes_at: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for b in PROBE_BS:
        if b < N:
            probes_at[pdeg(b)].append((b, b))  # (probe point, column-combination mask)
    full = (1 << N) - 1
    checked = 0
    found: list[tuple[int, ...]] = []
    acols = [0] * n

    def confirm() -> None:
        nonlocal checked
        checked += 1
        A = LinMap(n, tuple(acols))
        L = adjoint(ctx, A)  # involution: A is exactly L*
        seen = 0
        for x in range(N):
            seen |= 1 << (inv[x] ^ L(x))
        if seen == full:
            found.append(L.cols)

    def rec(level: int) -> None:
        nonlocal checked
        values = c0_values if level == 0 else range(N)
        tail = N ** (n - 1 - level)
        for c in values:
            acols[level] = c
            ok = True
            for b, comb in probes_at[level]:
                ab = 0
                i = 0
                while comb >> i:
                    if (comb >> i) & 1:
                        ab ^= acols[i]
                    i += 1
                if not kz[mul[b][ab]]:
                    ok = False
                    break
            if not ok:
                checked += tail  # every completion fails this probe
                continue
            if level == n - 1:
                if any(acols):
                    confirm()
            else:
                rec(level + 1)

    rec(0)
    return checked, found


def sweep_inverse_plus_linear(ctx: FieldCtx, jobs: int = 1,
                              allow_small: bool = False) -> SweepReport:
    """Check every nonzero linear L: is x^-1 + L(x) ever a permutation?

    Sized for n = 5 (2^25 - 1 candidates); smaller degrees are allowed only
    as explicit out-of-range fixtures.
    """
    n = ctx.n
    if n != 5 and not (allow_small and n < 5):
        raise ValueError(
            "exhaustive sweep covers n = 5; use allow_small for fixture runs below, "
            "randomized search above"
        )
    start = time.perf_counter()
    N = ctx.size
    if jobs <= 1:
        checked, found = _sweep_range(n, ctx.poly, list(range(N)))
        found_all = list(found)
    else:
        chunks = [list(range(N))[i::jobs] for i in range(jobs)]
        checked = 0
        found_all = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = [pool.submit(_sweep_range, n, ctx.poly, ch) for ch in chunks]
            for fut in futs:
                c, f = fut.result()
                checked += c
                found_all.extend(f)
    if checked != (1 << (n * n)) - 1:
        raise AssertionError("sweep accounting lost candidates")
    elapsed = time.perf_counter() - start
    perms = tuple(LinMap(n, cols) for cols in sorted(found_all))
    return SweepReport(n=n, candidates_checked=checked,
                       permutations_found=perms, wall_time_s=elapsed, jobs=jobs)


# ---------------------------------------------------------------------------
# Randomized / structured counterexample search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchReport:
    n: int
    mode: str
    budget: int
    seed: int
    pairs_examined: int
    found: tuple[LinMap, LinMap] | None

    def to_json(self) -> dict:
        f = None
        if self.found is not None:
            f = [{"matrix_cols": [hex(c) for c in L.cols]} for L in self.found]
        return {
            "n": self.n, "mode": self.mode, "budget": self.budget,
            "seed": self.seed, "pairs_examined": self.pairs_examined,
            "found": f,
        }


def search_counterexample(ctx: FieldCtx, mode: str = "random", budget: int = 10**6,
                          seed: int = 0, batch: int = 1 << 14,
                          spectrum: Spectrum | None = None) -> SearchReport:
    """Sample (L1, L2) pairs hunting a permutation L1(x^-1) + L2(x).

    Pairs are drawn as adjoint matrices (a bijective reparametrization, so
    random mode stays uniform).  structured mode divides fresh Kloosterman
    zeros by the first-map columns so all basis-point probes pass by
    construction, forcing the deeper probes and direct confirmation to do
    the rejecting.  Any survivor is re-checked with perm_direct.
    """
    if ctx.n < 5:
        raise ValueError("search mirrors statements that need n >= 5")
    if mode not in ("random", "structured"):
        raise ValueError(f"unknown mode {mode!r}")
    n = ctx.n
    N = ctx.size
    spec = spectrum if spectrum is not None else kloosterman_spectrum(ctx)
    kz_mask = spec.data == 0
    zeros = np.flatnonzero(kz_mask).astype(np.uint32)
    zeros = zeros[zeros > 0]
    inv = ctx.inverse_table()
    rng = np.random.default_rng(seed)
    probes = [b for b in range(1, min(N, 17))]
    examined = 0
    found: tuple[LinMap, LinMap] | None = None
    while examined < budget and found is None:
        b_sz = min(batch, budget - examined)
        c1 = rng.integers(0, N, size=(b_sz, n)).astype(np.uint32)
        if mode == "random":
            c2 = rng.integers(0, N, size=(b_sz, n)).astype(np.uint32)
        else:
            z = zeros[rng.integers(0, zeros.size, size=(b_sz, n))]
            c2 = ctx.mul_vec(z, inv[c1])
        alive = np.ones(b_sz, dtype=bool)
        for b in probes:
            if not alive.any():
                break
            a1 = np.zeros(b_sz, dtype=np.uint32)
            a2 = np.zeros(b_sz, dtype=np.uint32)
            for i in range(n):
                if (b >> i) & 1:
                    a1 ^= c1[:, i]
                    a2 ^= c2[:, i]
            alive &= kz_mask[ctx.mul_vec(a1, a2)]
        for idx in np.flatnonzero(alive):
            A1 = LinMap(n, tuple(int(v) for v in c1[idx]))
            A2 = LinMap(n, tuple(int(v) for v in c2[idx]))
            if A1.is_zero() or A2.is_zero():
                continue  # the statement under test requires nonzero maps
            L1 = adjoint(ctx, A1)
            L2 = adjoint(ctx, A2)
            if perm_direct(ctx, L1, L2).is_perm:
                found = (L1, L2)
                break
        examined += b_sz
    return SearchReport(n=n, mode=mode, budget=budget, seed=seed,
                        pairs_examined=examined, found=found)


def kernel_bound_applies(ctx: FieldCtx, L1: LinMap, L2: LinMap) -> bool:
    """True when a kernel is provably too large for bijectivity (n >= 5)."""
    if ctx.n < 5:
        raise ValueError("kernel bound needs n >= 5")
    if L1.is_zero() or L2.is_zero():
        raise ValueError("kernel bound applies to nonzero maps only")
    d = zero_subspace_bound(ctx.n)
    return max(kernel_dim(L1), kernel_dim(L2)) > d
