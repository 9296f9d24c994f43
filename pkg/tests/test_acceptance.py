"""Acceptance criteria 1-12, one test each, at their stated tolerances and time limits.

Each test prints ``criterion N: PASS|FAIL (time)``; the lines are repeated in
the terminal summary of the pytest run.
"""

import functools
import itertools
import json
import random

from slicecalc.bredon import (
    bredon_homology,
    cohomology_H01,
    p_local_violations,
    verify_closed_form,
)
from slicecalc.cells import virtual_form_complex
from slicecalc.cli import main
from slicecalc.library import identify, library, parse_coefficient
from slicecalc.linalg import ChainComplexError, GroupHom, PresentedGroup, homology_at, imat, smith_normal_form
from slicecalc.mackey import (
    GroupContext,
    MackeyMorphism,
    check_axioms,
    ind_res,
    ind_res_shift,
    induce,
    inflate,
    mackey_cokernel,
    mackey_iso,
    mackey_kernel,
    make_B,
    make_B_ell,
    make_B_star,
    make_fixed_point_permutation,
    make_Z,
    restrict,
)
from slicecalc.reps import (
    RealRep,
    parse_rep,
    rep_identities_check,
    rho,
    special_coeffs_bounds_ok,
    special_coeffs_rep,
    v_coeffs_special,
    v_floor,
    v_recursive,
    vp,
)
from slicecalc.slices import e2_page, regrade

from .helpers import det
from .test_reps import TABLE_C27, TAGS_C27

FULL_GRID = [(p, n) for p in (3, 5) for n in (1, 2, 3)]
EXACTNESS_GRID = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)]
SWEEP_GRID = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)]

# Ind_h Res_h of a rank-r level has rank r * p^(n-h); beyond this the dense
# structure maps no longer fit comfortably in memory
MAX_INDUCED_RANK = 729


@functools.cache
def sweep_reps(p, n, max_dim=12):
    """Fixed-point-free representations of C_{p^n} of dimension at most max_dim."""
    ctx = GroupContext(p, n)
    out = []
    for mult in itertools.product(range(max_dim // 2 + 1), repeat=n):
        if 2 * sum(mult) <= max_dim:
            out.append(RealRep(ctx, 0, mult))
    return out


@functools.cache
def oracle(V, k):
    return bredon_homology(V, make_B(k, 0, V.ctx))


# -- 1 ------------------------------------------------------------------------------


def test_criterion_01_table_golden(criterion, capsys):
    with criterion(1, limit=1.0):
        assert main(["vseq", "--p", "3", "--n", "3", "--max", "27", "--format", "json"]) == 0
        rows = json.loads(capsys.readouterr().out)["rows"]
        ctx = GroupContext(3, 3)
        assert len(rows) == 27
        for r in rows:
            j = r["j"]
            V = parse_rep(r["rep"], ctx)
            assert (V.triv, *V.mult) == TABLE_C27[j]
            assert r.get("tag") == TAGS_C27.get(j)
            assert v_recursive(j, ctx) == v_floor(j, ctx) == V


# -- 2 ------------------------------------------------------------------------------


def test_criterion_02_rep_identities(criterion):
    with criterion(2, limit=5.0):
        for p, n in FULL_GRID:
            ctx = GroupContext(p, n)
            N = p**n
            two_rho = 2 * rho(ctx)
            one = RealRep.trivial(1, ctx)
            assert rep_identities_check(ctx) == []
            assert v_recursive(N, ctx) == two_rho
            assert v_recursive((N - 1) // 2, ctx) == rho(ctx) - one
            assert v_recursive((N + 1) // 2, ctx) == rho(ctx) + one
            for j in range(1, N):
                Vj = v_recursive(j, ctx)
                assert v_recursive(j + N, ctx) == two_rho + Vj
                assert v_recursive(N - j, ctx) == two_rho - Vj


# -- 3 ------------------------------------------------------------------------------


def test_criterion_03_special_coefficients(criterion):
    with criterion(3):
        for p, n in FULL_GRID:
            ctx = GroupContext(p, n)
            for a in range(1, 2 * p**n + 1, 2):
                assert special_coeffs_rep(a, ctx) == v_floor((a * p - 1) // 2, ctx)
                assert v_coeffs_special(a, ctx)[0] == (p - 1) // 2 * a
                assert special_coeffs_bounds_ok(a, ctx)


# -- 4 ------------------------------------------------------------------------------


def constructor_outputs(ctx):
    n = ctx.n
    for k in range(n + 1):
        for j in range(k + 1):
            yield make_Z(k, j, ctx)
        yield make_fixed_point_permutation(k, ctx)
        for j in range(n + 1):
            yield make_B(k, j, ctx)
            yield make_B_star(k, j, ctx)
            for ell in range(-k, n + 2):
                yield make_B_ell(k, j, ell, ctx)


def test_criterion_04_mackey_axioms(criterion):
    with criterion(4):
        skipped = []
        for p, n in FULL_GRID:
            ctx = GroupContext(p, n)
            for M in constructor_outputs(ctx):
                assert check_axioms(M) == [], M.name
            for M in library(ctx):
                for h in range(n + 1):
                    R = restrict(h, M)
                    assert check_axioms(R) == [], (M.name, "res", h)
                    if max(g.gens for g in M.levels) * p ** (n - h) > MAX_INDUCED_RANK:
                        skipped.append((p, n, M.name, h))
                        continue
                    assert check_axioms(induce(h, R, ctx)) == [], (M.name, "ind res", h)
                    assert check_axioms(ind_res(h, M)) == [], (M.name, "ind_res", h)
            for j in range(1, n + 1):
                for M in library(GroupContext(p, n - j)):
                    assert check_axioms(inflate(j, M, ctx)) == [], (M.name, "inflate", j)
        print(f"induced functors above rank {MAX_INDUCED_RANK} not built: {skipped}")
        assert all(p == 5 and n == 3 for p, n, _, _ in skipped)


# -- 5 ------------------------------------------------------------------------------


def test_criterion_05_exact_sequences(criterion):
    with criterion(5):
        for p, n in EXACTNESS_GRID:
            ctx = GroupContext(p, n)
            Z = make_Z(n, n, ctx)
            # 0 -> Z -> Ind_k Res_k Z -(1 - gamma)-> Ind_k Res_k Z -> Z(n,k) -> 0
            for k in range(n + 1):
                P = ind_res(k, Z)
                f = MackeyMorphism.identity(P) - ind_res_shift(k, Z, P)
                K, _ = mackey_kernel(f)
                C, _ = mackey_cokernel(f)
                assert mackey_iso(K, Z), (p, n, k)
                assert mackey_iso(C, make_Z(n, k, ctx)), (p, n, k)
            # 0 -> B_{min(l,k)} -> Ind_l Res_l B_k -(gamma - 1)-> Ind_l Res_l B_k -> B^(l-k)_k -> 0
            for k in range(n + 1):
                Bk = make_B(k, 0, ctx)
                for ell in range(n + 1):
                    P = ind_res(ell, Bk)
                    f = ind_res_shift(ell, Bk, P) - MackeyMorphism.identity(P)
                    K, _ = mackey_kernel(f)
                    C, _ = mackey_cokernel(f)
                    assert mackey_iso(K, make_B(min(ell, k), 0, ctx)), (p, n, k, ell)
                    assert mackey_iso(C, make_B_ell(k, 0, ell - k, ctx)), (p, n, k, ell)


# -- 6 ------------------------------------------------------------------------------


def test_criterion_06_virtual_form(criterion):
    with criterion(6, limit=10.0):
        for p, n in EXACTNESS_GRID:
            ctx = GroupContext(p, n)
            for k in range(1, n):
                for j in range(k):
                    C = virtual_form_complex(k, j, ctx)
                    assert mackey_iso(C.homology(0).functor, make_Z(k, j, ctx)), (p, n, k, j)
                    for s in C.degrees():
                        if s != 0:
                            assert C.homology(s).functor.is_zero(), (p, n, k, j, s)


# -- 7 ------------------------------------------------------------------------------


def test_criterion_07_closed_form_sweep(criterion):
    with criterion(7, limit=120.0):
        counts = {"match": 0, "ambiguous": 0, "mismatch": 0}
        mismatches = []
        for p, n in SWEEP_GRID:
            for V in sweep_reps(p, n):
                for k in range(1, n + 1):
                    for r in verify_closed_form(V, k, oracle=oracle(V, k)):
                        counts[r.verdict] += 1
                        if r.verdict == "mismatch":
                            mismatches.append(r.to_dict())
        print(f"closed-form cells: {counts}")
        assert counts["match"] > 0
        assert mismatches == []


# -- 8 ------------------------------------------------------------------------------


def test_criterion_08_bottom_cohomology(criterion):
    with criterion(8):
        for p, n in EXACTNESS_GRID:
            ctx = GroupContext(p, n)
            for mult in itertools.product(range(3), repeat=n):
                V = RealRep(ctx, 0, mult)
                present = [m for m, c in enumerate(mult) if c]
                for k in range(1, n + 1):
                    if not any(m >= k for m in present):
                        continue
                    H0, H1 = cohomology_H01(V, make_B(k, 0, ctx))
                    assert H0.is_zero() and H1.is_zero(), (p, n, mult, k)


# -- 9 ------------------------------------------------------------------------------


def test_criterion_09_c27_chart(criterion):
    with criterion(9, limit=60.0):
        ctx = GroupContext(3, 3)
        p, n = ctx.p, ctx.n
        chart = e2_page("inf-lambda", (-2, 54), ctx)
        # (a)
        assert chart.nonzero_columns() == [t for t in range(-2, 55) if t % 2 == 0 and (t + 1) % p == 0]
        # (b): slopes 2 and 26 through (-1, 0) in the (x, s) plane, equivalently
        # 0 <= y <= (p^(n-1) - 1)(x + 1) after regrading
        for c in chart.cells:
            x, y = regrade(c.s, c.t, ctx)
            assert (x, y) == (c.x, c.y)
            assert 2 * (x + 1) <= c.s <= (p**n - 1) * (x + 1), (c.s, c.t)
            assert 0 <= y <= (p ** (n - 1) - 1) * (x + 1), (c.s, c.t)
        # (c)
        for t in chart.nonzero_columns():
            k = vp(p, t + 1)
            a = (t + 1) // p**k
            if k >= 1:
                assert max(t - c.s for c in chart.column(t)) == a * p ** (k - 1) - 1, t


# -- 10 ------------------------------------------------------------------------------


def same_functor(name, M):
    """Compare a chart label with a computed functor, by isomorphism when the label parses."""
    try:
        N = parse_coefficient(name, M.ctx)
    except ValueError:
        return name == identify(M) or name.startswith("[")
    return bool(mackey_iso(N, M))


def test_criterion_10_finite_towers(criterion):
    with criterion(10):
        ctx = GroupContext(3, 3)
        Z = make_Z(3, 3, ctx)
        inf = e2_page("inf-lambda", (-1, 18), ctx)
        for m in range(9):
            fin = e2_page(f"m-lambda:{m}", (-1, 2 * m + 2), ctx)
            assert [c for c in fin.key() if c[1] < 2 * m] == [c for c in inf.key() if c[1] < 2 * m], m
            assert all(c.t <= 2 * m for c in fin.cells), m
            H = bredon_homology(v_recursive(m, ctx), Z)
            col = {2 * m - c.s: c.functor for c in fin.column(2 * m)}
            assert sorted(col) == H.degrees(), m
            for s, name in col.items():
                assert same_functor(name, H[s]), (m, s, name)
        prev = bredon_homology(RealRep.lam(0, ctx, 0), Z)
        for m in range(9):
            nxt = bredon_homology(RealRep.lam(0, ctx, m + 1), Z)
            for s in range(2 * m):
                assert mackey_iso(prev[s], nxt[s]), (m, s)
            prev = nxt


# -- 11 ------------------------------------------------------------------------------


def test_criterion_11_p_locality(criterion):
    with criterion(11):
        checked = 0
        for p, n in SWEEP_GRID:
            ctx = GroupContext(p, n)
            for V in sweep_reps(p, n):
                for k in range(1, n + 1):
                    H = oracle(V, k)
                    for s in H.degrees():
                        assert p_local_violations(H[s]) == [], (V, k, s)
                        checked += 1
            # the named functors with cyclic levels; permutation coefficients are
            # covered by the property test in test_bredon
            cyclic = [M for M in library(ctx) if max(g.gens for g in M.levels) <= 1]
            for V in sweep_reps(p, n, max_dim=6):
                for t in (0, 1):
                    W = V + RealRep.trivial(t, ctx)
                    for M in cyclic:
                        H = bredon_homology(W, M)
                        for s in H.degrees():
                            assert p_local_violations(H[s]) == [], (W, M.name, s)
                            checked += 1
        chart = e2_page("inf-lambda", (-2, 54), GroupContext(3, 3))
        for t, desc in chart.columns.items():
            if not desc.contractible:
                H = bredon_homology(desc.rep, desc.functor(chart.ctx))
                for s in H.degrees():
                    assert p_local_violations(H[s]) == [], (t, s)
                    checked += 1
        print(f"homology groups checked: {checked}")


# -- 12 ------------------------------------------------------------------------------


def divides(a, b):
    return b == 0 if a == 0 else b % a == 0


def free_hom(rows):
    A = imat(rows)
    return GroupHom(PresentedGroup.free(A.shape[1]), PresentedGroup.free(A.shape[0]), A)


def test_criterion_12_linear_algebra(criterion):
    rng = random.Random(20260101)
    with criterion(12, limit=5.0):
        for _ in range(500):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            A = imat([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
            U, D, V = smith_normal_form(A)
            assert (U @ A @ V == D).all()
            assert abs(det(U.tolist())) == 1 and abs(det(V.tolist())) == 1
            diag = [D[i, i] for i in range(min(r, c))]
            assert all(D[i, j] == 0 for i in range(r) for j in range(c) if i != j)
            assert all(d >= 0 for d in diag)
            assert all(divides(a, b) for a, b in zip(diag, diag[1:]))
        raised = 0
        while raised < 100:
            a, b, c = rng.randint(1, 6), rng.randint(1, 6), rng.randint(1, 6)
            d_in = [[rng.randint(-9, 9) for _ in range(a)] for _ in range(b)]
            d_out = [[rng.randint(-9, 9) for _ in range(b)] for _ in range(c)]
            if not (imat(d_out) @ imat(d_in)).any():
                continue
            try:
                homology_at(free_hom(d_in), free_hom(d_out))
            except ChainComplexError:
                raised += 1
            else:
                raise AssertionError("homology_at accepted a non-complex")
