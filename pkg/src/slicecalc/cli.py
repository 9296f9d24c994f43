"""Command-line front end: ``slicecalc {vseq,homology,verify,chart}``.

Exit status is 0 on success, 1 when a verification finds a mismatch and 2 for
usage, parse or I/O errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import warnings

import numpy as np

from .bredon import bredon_homology, p_local_violations, parallel_map, verify_closed_form, worker_count
from .library import CoefficientError, parse_coefficient
from .linalg import ChainComplexError, NotCompatibleError
from .mackey import (
    GroupContext,
    MackeyFunctor,
    MackeyMorphism,
    ind_res,
    ind_res_shift,
    mackey_cokernel,
    mackey_iso,
    mackey_kernel,
    make_B,
    make_B_ell,
)
from .reps import RealRep, RepParseError, parse_rep, rep_identities_check, special_form, v_recursive
from .slices import e2_page, render

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _ctx(args) -> GroupContext:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    try:
        return GroupContext(args.p, args.n)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {out}: {e.strerror}") from None


# -- vseq -------------------------------------------------------------------


def cmd_vseq(args) -> int:
    ctx = _ctx(args)
    if args.max < 0:
        raise UsageError("--max must be non-negative")
    rows = []
    for j in range(1, args.max + 1):
        V = v_recursive(j, ctx)
        rows.append({"j": j, "rep": V.grammar(), "pretty": V.pretty(), "tag": special_form(j, ctx)})
    if args.format == "json":
        _emit(json.dumps({"p": ctx.p, "n": ctx.n, "rows": rows}, ensure_ascii=False, sort_keys=True) + "\n", args.out)
    else:
        lines = [f"V_j for C_{ctx.p}^{ctx.n}"] if rows else []
        for r in rows:
            tag = f"  = {r['tag']}" if r["tag"] else ""
            lines.append(f"{r['j']:>4}  {r['pretty']:<28} {r['rep']}{tag}")
        _emit("\n".join(lines) + ("\n" if lines else ""), args.out)
    return EXIT_OK


# -- homology ---------------------------------------------------------------


def cmd_homology(args) -> int:
    ctx = _ctx(args)
    try:
        V = parse_rep(args.rep, ctx)
    except RepParseError as e:
        raise UsageError(str(e)) from None
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            M = parse_coefficient(args.coeff, ctx)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except CoefficientError as e:
        raise UsageError(str(e)) from None
    M = M.with_name(args.coeff.strip())
    table = bredon_homology(V, M)
    if args.format == "json":
        _emit(json.dumps(table.to_dict(), sort_keys=True) + "\n", args.out)
    else:
        _emit(table.text() + "\n", args.out)
    return EXIT_OK


# -- verify -----------------------------------------------------------------


def _faulty(M: MackeyFunctor) -> MackeyFunctor:
    """Copy of M with one transfer changed (the topmost nonzero-level one)."""
    tr = [t.copy() for t in M.tr]
    for m in range(M.n - 1, -1, -1):
        if tr[m].size:
            tr[m] = tr[m] + np.ones_like(tr[m])
            break
    return MackeyFunctor(M.ctx, M.levels, M.res, tr, M.weyl, name=M.name)


def _reps_up_to(ctx: GroupContext, max_dim: int):
    for mult in itertools.product(range(max_dim // 2 + 1), repeat=ctx.n):
        if 2 * sum(mult) <= max_dim:
            yield RealRep(ctx, 0, mult)


def _closed_form_cases(ctx: GroupContext, V: RealRep, k: int, fault: bool) -> list[dict]:
    try:
        coeff = make_B(k, 0, ctx)
        oracle = bredon_homology(V, _faulty(coeff) if fault else coeff)
        results = verify_closed_form(V, k, oracle=oracle)
    except (ChainComplexError, NotCompatibleError, ValueError) as e:
        return [{"kind": "closed-form", "rep": V.grammar(), "k": k, "verdict": "mismatch", "detail": str(e)}]
    out = []
    for r in results:
        d = r.to_dict()
        d["kind"] = "closed-form"
        out.append(d)
    for s in oracle.degrees():
        bad = p_local_violations(oracle[s])
        if bad:
            out.append({"kind": "p-local", "rep": V.grammar(), "k": k, "s": s, "verdict": "mismatch", "detail": str(bad)})
    return out


def _exactness_cases(ctx: GroupContext) -> list[dict]:
    out = []
    n = ctx.n
    for k in range(n + 1):
        Bk = make_B(k, 0, ctx)
        for l in range(n + 1):
            IR = ind_res(l, Bk)
            f = ind_res_shift(l, Bk, IR) - MackeyMorphism.identity(IR)
            K, _ = mackey_kernel(f)
            C, _ = mackey_cokernel(f)
            ok = bool(mackey_iso(K, make_B(min(l, k), 0, ctx))) and bool(mackey_iso(C, make_B_ell(k, 0, l - k, ctx)))
            out.append({"kind": "exactness", "k": k, "l": l, "verdict": "match" if ok else "mismatch"})
    return out


def cmd_verify(args) -> int:
    ctx = _ctx(args)
    if args.max_dim < 0:
        raise UsageError("--max-dim must be non-negative")
    cases: list[dict] = []
    for msg in rep_identities_check(ctx):
        cases.append({"kind": "identity", "verdict": "mismatch", "detail": msg})
    if not cases:
        cases.append({"kind": "identity", "verdict": "match"})
    cases.extend(_exactness_cases(ctx))
    jobs = [(V, k) for V in _reps_up_to(ctx, args.max_dim) for k in range(1, ctx.n + 1)]
    for chunk in parallel_map(lambda vk: _closed_form_cases(ctx, vk[0], vk[1], args.inject_fault), jobs):
        cases.extend(chunk)
    counts = {v: sum(1 for c in cases if c["verdict"] == v) for v in ("match", "ambiguous", "mismatch")}
    report = {
        "p": ctx.p,
        "n": ctx.n,
        "max_dim": args.max_dim,
        "cases": cases,
        "matched": counts["match"],
        "ambiguous": counts["ambiguous"],
        "mismatched": counts["mismatch"],
    }
    _emit(json.dumps(report, sort_keys=True) + "\n", args.out)
    summary = f"verify p={ctx.p} n={ctx.n}: {counts['match']} matched, {counts['ambiguous']} ambiguous, {counts['mismatch']} mismatched"
    print(summary, file=sys.stderr)
    return EXIT_OK if counts["mismatch"] == 0 else EXIT_FAIL


# -- chart ------------------------------------------------------------------


def _trange(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"bad --trange {text!r}; expected a:b") from None


def cmd_chart(args) -> int:
    ctx = _ctx(args)
    t0, t1 = _trange(args.trange)
    annotations = []
    if args.annotations:
        try:
            with open(args.annotations, encoding="utf-8") as fh:
                annotations = json.load(fh)
        except OSError as e:
            raise UsageError(f"cannot read {args.annotations}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"bad JSON in {args.annotations}: {e}") from None
    try:
        chart = e2_page(args.target, (t0, t1), ctx, annotations)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _emit(render(chart, args.format), args.out)
    return EXIT_OK


# -- entry point --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="slicecalc", description="Bredon homology and slice charts for cyclic p-groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def group_args(p):
        p.add_argument("--p", type=int, required=True, help="odd prime")
        p.add_argument("--n", type=int, required=True, help="the group is C_{p^n}")
        p.add_argument("--out", help="write to this file instead of stdout")

    v = sub.add_parser("vseq", help="table of V_j")
    group_args(v)
    v.add_argument("--max", type=int, required=True)
    v.add_argument("--format", choices=("text", "json"), default="text")
    v.set_defaults(func=cmd_vseq)

    h = sub.add_parser("homology", help="Bredon homology of S^V")
    group_args(h)
    h.add_argument("--rep", required=True, help="e.g. 2t+3l0+1l1")
    h.add_argument("--coeff", required=True, help="Z, Z(k,j), B(k,j), B*(k,j), Bl(k,j,l) or perm(k)")
    h.add_argument("--format", choices=("text", "json"), default="text")
    h.set_defaults(func=cmd_homology)

    r = sub.add_parser("verify", help="check closed forms against cellular computations")
    group_args(r)
    r.add_argument("--max-dim", type=int, required=True)
    r.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    r.set_defaults(func=cmd_verify)

    c = sub.add_parser("chart", help="E2 chart of a slice spectral sequence")
    group_args(c)
    c.add_argument("--target", required=True, help="inf-lambda or m-lambda:<m>")
    c.add_argument("--trange", required=True, help="t0:t1, inclusive")
    c.add_argument("--format", choices=("svg", "json", "text"), default="svg")
    c.add_argument("--annotations", help="path to a JSON list of {from: [s,t], to: [s,t], kind} arrows")
    c.set_defaults(func=cmd_chart)
    return ap


def _fix_negative_values(argv: list[str]) -> list[str]:
    # let "--trange -2:54" through argparse
    out = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a == "--trange" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"--trange={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_fix_negative_values(argv))
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        worker_count()
        return args.func(args)
    except UsageError as e:
        print(f"slicecalc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"slicecalc: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
