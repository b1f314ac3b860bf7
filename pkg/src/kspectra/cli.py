"""Command-line front end: spectra, searches, form invariants, verification bundles.

Exit codes: 0 success / all checks verified, 1 a verification found a
violation, 2 usage errors.  Reports are deterministic for a fixed
(range, seed) apart from wall-time fields.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from kspectra.gf2n import mk_field
from kspectra.linmap import map_from_json, map_to_json, random_subspace
from kspectra.permcheck import (
    perm_direct,
    perm_spectral,
    search_counterexample,
    sweep_inverse_plus_linear,
)
from kspectra.quadform import (
    count_zeros,
    expected_h_zero_count,
    max_isotropic_dim,
    restrict_q_to_h,
)
from kspectra.spectra import kloosterman_spectrum, kloosterman_zeros
from kspectra.zerospace import (
    max_mod16_subspace,
    max_subspace_in_set,
    max_zero_subspace,
    mod16_members,
    mod16_subspace_bound,
    subspace_sum_identity,
    weil_subspace_bound,
    zero_subspace_bound,
)
from kspectra.linmap import random_map


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2)


def _ctx(args):
    poly = int(args.poly, 0) if getattr(args, "poly", None) else None
    return mk_field(args.n, poly)


# ---------------------------------------------------------------------------
# plain commands
# ---------------------------------------------------------------------------

def cmd_spectrum(args) -> int:
    ctx = _ctx(args)
    if args.what != "kloosterman":
        raise ValueError(f"unknown spectrum kind {args.what!r}")
    spec = kloosterman_spectrum(ctx)
    if args.format == "csv":
        lines = ["elem_hex,value"]
        lines.extend(spec.to_csv_rows())
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _json({"n": spec.n, "kind": spec.kind,
                           "data": [int(v) for v in spec.data]}))
    return 0


def cmd_zeros(args) -> int:
    ctx = _ctx(args)
    zeros = sorted(kloosterman_zeros(ctx, include_trivial=args.include_zero))
    count = len(zeros)
    ratio = count / 2 ** (ctx.n / 2)
    _emit(args, _json({
        "n": ctx.n,
        "zeros": [hex(z) for z in zeros],
        "count": count,
        "ratio_to_2^{n/2}": round(ratio, 4),
    }))
    return 0


def cmd_zerospace(args) -> int:
    ctx = _ctx(args)
    if args.set == "zeros":
        rep = max_zero_subspace(ctx, prune_isotropic=not args.no_prune,
                                node_budget=args.budget)
    else:
        rep = max_mod16_subspace(ctx, node_budget=args.budget)
    _emit(args, _json(rep.to_json()))
    return 0


def cmd_qform(args) -> int:
    ctx = _ctx(args)
    rec = restrict_q_to_h(ctx)
    _emit(args, _json({
        "n": ctx.n,
        "dim_H": rec.m,
        "radical_dim": rec.radical_basis.dim,
        "type": rec.form_type,
        "witt_index": rec.witt_index,
        "zeros": count_zeros(rec),
        "expected_zeros": expected_h_zero_count(ctx.n),
        "max_isotropic_dim": max_isotropic_dim(rec),
    }))
    return 0


def cmd_permcheck(args) -> int:
    ctx = _ctx(args)
    L1 = map_from_json(ctx, json.loads(args.l1))
    L2 = map_from_json(ctx, json.loads(args.l2))
    out: dict = {"n": ctx.n, "l1": map_to_json(ctx, L1), "l2": map_to_json(ctx, L2)}
    code = 0
    if args.method in ("direct", "both"):
        out["direct"] = perm_direct(ctx, L1, L2).to_json()
    if args.method in ("spectral", "both"):
        out["spectral"] = perm_spectral(ctx, L1, L2).to_json()
    if args.method == "both":
        out["agree"] = out["direct"]["is_perm"] == out["spectral"]["is_perm"]
        code = 0 if out["agree"] else 1
    _emit(args, _json(out))
    return code


def cmd_table1(args) -> int:
    lines = []
    if args.side == "right":
        lines.append("n,max_dim")
        for n in range(args.start, args.end + 1):
            rep = max_zero_subspace(mk_field(n), node_budget=args.budget)
            mark = "" if rep.exhaustive else "?"
            lines.append(f"{n},{rep.best_dim}{mark}")
    else:
        lines.append("n,count,ratio_trunc,ratio_round")
        for n in range(args.start, args.end + 1):
            count = len(kloosterman_zeros(mk_field(n)))
            ratio = count / 2 ** (n / 2)
            trunc = math.floor(ratio * 100) / 100
            lines.append(f"{n},{count},{trunc:.2f},{round(ratio, 2):.2f}")
    _emit(args, "\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# verification bundles
# ---------------------------------------------------------------------------

def _check_mod16_criterion(args) -> dict:
    violations = []
    for n in range(args.start or 4, (args.end or 16) + 1):
        ctx = mk_field(n)
        spec = kloosterman_spectrum(ctx)
        from_spec = np.flatnonzero(spec.data % 16 == 0).astype(np.uint32)
        if not np.array_equal(from_spec, mod16_members(ctx)):
            violations.append({"n": n})
    return {"criterion": "mod16-criterion",
            "statement": "K(a) = 0 mod 16 iff Tr(a) = 0 and q(a) = 0",
            "violations": violations}


def _check_radical(args) -> dict:
    violations = []
    for n in range(args.start or 4, (args.end or 24) + 1):
        rec = restrict_q_to_h(mk_field(n), validate=False)
        want = (1,) if n % 4 == 0 else ()
        if rec.radical_basis.vectors != want:
            violations.append({"n": n, "got": [hex(v) for v in rec.radical_basis.vectors]})
    return {"criterion": "radical",
            "statement": "radical of q|H is {0,1} iff 4 divides n, else {0}",
            "violations": violations}


def _check_quadric_count(args) -> dict:
    violations = []
    for n in range(args.start or 4, (args.end or 24) + 1):
        rec = restrict_q_to_h(mk_field(n), validate=False)
        got = count_zeros(rec)
        want = expected_h_zero_count(n)
        if got != want:
            violations.append({"n": n, "got": got, "want": want})
    return {"criterion": "quadric-count",
            "statement": "zero count of q|H equals the five-case closed form",
            "violations": violations}


def _check_mod16_sharpness(args) -> dict:
    violations = []
    for n in range(args.start or 5, (args.end or 12) + 1):
        rep = max_mod16_subspace(mk_field(n), node_budget=args.budget)
        if rep.best_dim != mod16_subspace_bound(n):
            violations.append({"n": n, "got": rep.best_dim,
                               "bound": mod16_subspace_bound(n)})
    return {"criterion": "mod16-sharpness",
            "statement": "searches attain the mod16 subspace bound exactly",
            "violations": violations}


def _check_zero_subspace_bound(args) -> dict:
    violations = []
    for n in range(args.start or 5, (args.end or 14) + 1):
        ctx = mk_field(n)
        rep = max_zero_subspace(ctx, node_budget=args.budget)
        if rep.best_dim > zero_subspace_bound(n):
            violations.append({"n": n, "dim": rep.best_dim})
            continue
        if n % 2 == 0:
            sub = ctx.subfield_elements(n // 2)
            for v in rep.best_basis.span():
                if int(v) and int(v) in sub:
                    violations.append({"n": n, "subfield_element": hex(int(v))})
    return {"criterion": "zero-subspace-bound",
            "statement": "zero-subspace dims stay within the bound; even n avoids the half subfield",
            "violations": violations}


def _check_inverse_linear_n5(args) -> dict:
    rep = sweep_inverse_plus_linear(mk_field(5), jobs=args.jobs)
    violations = []
    if rep.permutations_found:
        violations.append(rep.to_json())
    return {"criterion": "inverse-linear-n5",
            "statement": "no nonzero linear L makes x^-1 + L(x) a permutation at n = 5",
            "candidates_checked": rep.candidates_checked,
            "wall_time": rep.wall_time_s,
            "violations": violations}


def _check_subspace_sum_identity(args) -> dict:
    rng = np.random.default_rng(args.seed)
    samples = args.samples or 100
    violations = []
    for n in range(args.start or 5, (args.end or 12) + 1):
        ctx = mk_field(n)
        spec = kloosterman_spectrum(ctx)
        for _ in range(samples):
            V = random_subspace(rng, n, int(rng.integers(0, n)))
            lhs, rhs = subspace_sum_identity(ctx, V, spec)
            if lhs != rhs:
                violations.append({"n": n, "basis": [hex(v) for v in V.vectors],
                                   "lhs": lhs, "rhs": rhs})
    return {"criterion": "subspace-sum-identity", "seed": args.seed,
            "statement": "sum (K-1)^2 - 1 over V equals 2^(n+k) - 2^(n+1) + 2^k sum K(u^-1) over V-perp",
            "violations": violations}


def _check_weil_bound(args) -> dict:
    violations = []
    for n in range(args.start or 4, (args.end or 20) + 1):
        spec = kloosterman_spectrum(mk_field(n))
        bound = math.isqrt(1 << (n + 2))
        if int(np.abs(spec.data - 1).max()) > bound:
            violations.append({"n": n, "kind": "entry"})
        if int(spec.data.sum()) != 1 << n:
            violations.append({"n": n, "kind": "global-sum"})
    for n in range(5, 25):
        if zero_subspace_bound(n) > weil_subspace_bound(n):
            violations.append({"n": n, "kind": "bound-comparison"})
    return {"criterion": "weil-bound",
            "statement": "|K(a)-1| <= 2^(n/2+1) exactly; sum of K over the field is 2^n",
            "violations": violations}


def _check_subfield_zeros(args) -> dict:
    violations = []
    for n in range(args.start or 5, (args.end or 20) + 1):
        ctx = mk_field(n)
        spec = kloosterman_spectrum(ctx)
        for d in range(1, n):
            if n % d:
                continue
            for a in ctx.subfield_elements(d):
                if a and int(spec.data[a]) == 0:
                    violations.append({"n": n, "d": d, "a": hex(a)})
    return {"criterion": "subfield-zeros",
            "statement": "no Kloosterman zero lies in a proper subfield",
            "violations": violations}


def _check_spectral_vs_direct(args) -> dict:
    rng = np.random.default_rng(args.seed)
    samples = args.samples or 1000
    violations = []
    for n in range(args.start or 5, (args.end or 10) + 1):
        ctx = mk_field(n)
        spec = kloosterman_spectrum(ctx)
        for _ in range(samples):
            L1, L2 = random_map(rng, n), random_map(rng, n)
            if perm_spectral(ctx, L1, L2, spec).is_perm != perm_direct(ctx, L1, L2).is_perm:
                violations.append({"n": n,
                                   "l1": [hex(c) for c in L1.cols],
                                   "l2": [hex(c) for c in L2.cols]})
    return {"criterion": "spectral-vs-direct", "seed": args.seed, "samples": samples,
            "statement": "spectral and direct bijectivity verdicts agree",
            "violations": violations}


def _check_perm_search(args) -> dict:
    budget = args.budget or 100000
    violations = []
    for n in range(args.start or 5, (args.end or 10) + 1):
        ctx = mk_field(n)
        for mode in ("random", "structured"):
            rep = search_counterexample(ctx, mode, budget=budget, seed=args.seed)
            if rep.found is not None:
                violations.append(rep.to_json())
    return {"criterion": "perm-search", "seed": args.seed, "budget": budget,
            "statement": "no permutation L1(x^-1) + L2(x) with both maps nonzero",
            "violations": violations}


_CHECKS = {
    "mod16-criterion": _check_mod16_criterion,
    "radical": _check_radical,
    "quadric-count": _check_quadric_count,
    "mod16-sharpness": _check_mod16_sharpness,
    "zero-subspace-bound": _check_zero_subspace_bound,
    "inverse-linear-n5": _check_inverse_linear_n5,
    "subspace-sum-identity": _check_subspace_sum_identity,
    "weil-bound": _check_weil_bound,
    "subfield-zeros": _check_subfield_zeros,
    "spectral-vs-direct": _check_spectral_vs_direct,
    "perm-search": _check_perm_search,
}


def cmd_verify(args) -> int:
    names = list(_CHECKS) if args.theorem == "all" else [args.theorem]
    reports = []
    ok = True
    for name in names:
        rep = _CHECKS[name](args)
        rep["ok"] = not rep["violations"]
        ok &= rep["ok"]
        reports.append(rep)
    _emit(args, _json(reports if len(reports) > 1 else reports[0]))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kspectra",
                                description="Kloosterman spectra, quadratic-form "
                                            "invariants and zero-subspace searches over F_2^n")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_required=True):
        if n_required:
            sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--poly", help="reduction polynomial bitmask, e.g. 0x25")
        sp.add_argument("--out", help="write output to a file instead of stdout")

    sp = sub.add_parser("spectrum", help="export a full spectrum")
    common(sp)
    sp.add_argument("--what", default="kloosterman", choices=["kloosterman"])
    sp.add_argument("--format", default="csv", choices=["csv", "json"])
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("zeros", help="list Kloosterman zeros")
    common(sp)
    sp.add_argument("--include-zero", action="store_true",
                    help="count a = 0 as a zero as well")
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("zerospace", help="maximal subspace search inside a target set")
    common(sp)
    sp.add_argument("--set", default="zeros", choices=["zeros", "mod16"])
    sp.add_argument("--no-prune", action="store_true",
                    help="disable the trace-orthogonality pruning")
    sp.add_argument("--budget", type=int, help="node budget (non-exhaustive report)")
    sp.set_defaults(func=cmd_zerospace)

    sp = sub.add_parser("qform", help="invariants of the hyperplane quadratic form")
    common(sp)
    sp.set_defaults(func=cmd_qform)

    sp = sub.add_parser("permcheck", help="decide bijectivity of L1(x^-1) + L2(x)")
    common(sp)
    sp.add_argument("--l1", required=True, help="map as JSON {n, matrix_rows, linearized}")
    sp.add_argument("--l2", required=True)
    sp.add_argument("--method", default="both", choices=["direct", "spectral", "both"])
    sp.set_defaults(func=cmd_permcheck)

    sp = sub.add_parser("table1", help="summary tables: zero counts / max subspace dims")
    sp.add_argument("--side", required=True, choices=["left", "right"])
    sp.add_argument("--from", dest="start", type=int, required=True)
    sp.add_argument("--to", dest="end", type=int, required=True)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("verify", help="run a verification bundle")
    sp.add_argument("--theorem", default="all", choices=["all"] + sorted(_CHECKS))
    sp.add_argument("--from", dest="start", type=int)
    sp.add_argument("--to", dest="end", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
