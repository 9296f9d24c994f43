"""Mackey functors for cyclic p-groups.

A Mackey functor for G = C_{p^n} is stored as a Lewis diagram: one abelian
group per orbit G/C_{p^m} (``levels[m]``, so level 0 is G/e and level n is
G/G), restriction ``res[m]: level m+1 -> level m``, transfer
``tr[m]: level m -> level m+1`` and the action ``weyl[m]`` of the generator
gamma on level m.

Every level is a diagonal presentation (a direct sum of cyclic groups, one
per generator) and all structure maps are integer matrices on those
generators, reduced modulo the target moduli.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .linalg import (
    GroupHom,
    PresentedGroup,
    _mul,
    cokernel_witness,
    homology_at,
    identity,
    imat,
    induced_hom,
    kernel,
    zeros,
)

__all__ = [
    "GroupContext",
    "MackeyFunctor",
    "MackeyMorphism",
    "IsoVerdict",
    "check_axioms",
    "zero_functor",
    "make_Z",
    "make_B",
    "make_B_star",
    "make_B_ell",
    "make_fixed_point_permutation",
    "restrict",
    "induce",
    "inflate",
    "ind_res",
    "ind_res_shift",
    "counit",
    "unit",
    "ind_res_pullback",
    "direct_sum",
    "mackey_kernel",
    "mackey_cokernel",
    "mackey_homology",
    "hom_group",
    "mackey_iso",
    "lewis_diagram",
]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, math.isqrt(p) + 1))


@dataclass(frozen=True)
class GroupContext:
    """The group C_{p^n}; levels m = 0..n stand for the orbits G/C_{p^m}."""

    p: int
    n: int

    def __post_init__(self):
        if not _is_prime(self.p) or self.p < 3:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")

    def index(self, m: int) -> int:
        """|G / C_{p^m}|."""
        return self.p ** (self.n - m)

    def level_name(self, m: int) -> str:
        if m == self.n:
            return "G/G"
        if m == 0:
            return "G/e"
        return f"G/C{self.p ** m}"


def _reduce(group: PresentedGroup, X: np.ndarray) -> np.ndarray:
    return group.reduce(X) if X.size else X


def _check_shape(X, rows, cols, what):
    if X.shape != (rows, cols):
        raise ValueError(f"{what}: expected shape {(rows, cols)}, got {X.shape}")


class MackeyFunctor:
    """Lewis-diagram data for a Mackey functor on C_{p^n}.

    Values are immutable once built. Equality is on-the-nose equality of the
    levels and all structure matrices; use :func:`mackey_iso` for isomorphism.
    """

    def __init__(self, ctx: GroupContext, levels, res, tr, weyl=None, name: str | None = None):
        n = ctx.n
        levels = tuple(levels)
        if len(levels) != n + 1:
            raise ValueError(f"need {n + 1} levels, got {len(levels)}")
        for g in levels:
            if g.moduli is None:
                raise ValueError("Mackey functor levels must be diagonal presentations")
        if weyl is None:
            weyl = [identity(g.gens) for g in levels]
        if len(res) != n or len(tr) != n or len(weyl) != n + 1:
            raise ValueError("wrong number of structure maps")
        res = [imat(r, (levels[m].gens, levels[m + 1].gens)) if not isinstance(r, np.ndarray) else r
               for m, r in enumerate(res)]
        tr = [imat(t, (levels[m + 1].gens, levels[m].gens)) if not isinstance(t, np.ndarray) else t
              for m, t in enumerate(tr)]
        weyl = [imat(w, (levels[m].gens, levels[m].gens)) if not isinstance(w, np.ndarray) else w
                for m, w in enumerate(weyl)]
        for m in range(n):
            _check_shape(res[m], levels[m].gens, levels[m + 1].gens, f"res[{m}]")
            _check_shape(tr[m], levels[m + 1].gens, levels[m].gens, f"tr[{m}]")
        for m in range(n + 1):
            _check_shape(weyl[m], levels[m].gens, levels[m].gens, f"weyl[{m}]")
        self.ctx = ctx
        self.levels = levels
        self.res = tuple(_reduce(levels[m], res[m]) for m in range(n))
        self.tr = tuple(_reduce(levels[m + 1], tr[m]) for m in range(n))
        self.weyl = tuple(_reduce(levels[m], weyl[m]) for m in range(n + 1))
        self.name = name
        self._wpow: dict = {}

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return self.ctx.n

    @property
    def p(self) -> int:
        return self.ctx.p

    def gens(self, m: int) -> int:
        return self.levels[m].gens

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.levels)

    def has_trivial_weyl(self) -> bool:
        return all(
            np.array_equal(self.weyl[m], _reduce(self.levels[m], identity(self.gens(m))))
            for m in range(self.n + 1)
        )

    def weyl_pow(self, m: int, c: int) -> np.ndarray:
        """gamma^c acting on level m (c taken modulo |G/C_{p^m}|)."""
        c %= self.ctx.index(m)
        key = (m, c)
        if key not in self._wpow:
            g = self.levels[m]
            if c == 0:
                out = _reduce(g, identity(g.gens))
            else:
                out = _reduce(g, _mul(self.weyl[m], self.weyl_pow(m, c - 1)))
            self._wpow[key] = out
        return self._wpow[key]

    def res_between(self, hi: int, lo: int) -> np.ndarray:
        """Composite restriction from level ``hi`` down to level ``lo``."""
        out = identity(self.gens(hi))
        for m in range(hi - 1, lo - 1, -1):
            out = _mul(self.res[m], out)
        return _reduce(self.levels[lo], out)

    def tr_between(self, lo: int, hi: int) -> np.ndarray:
        """Composite transfer from level ``lo`` up to level ``hi``."""
        out = identity(self.gens(lo))
        for m in range(lo, hi):
            out = _mul(self.tr[m], out)
        return _reduce(self.levels[hi], out)

    def orders(self) -> tuple[tuple[int, ...], ...]:
        return tuple(g.orders for g in self.levels)

    def __eq__(self, other):
        if not isinstance(other, MackeyFunctor):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and all(a.moduli == b.moduli for a, b in zip(self.levels, other.levels))
            and all(np.array_equal(a, b) for a, b in zip(self.res, other.res))
            and all(np.array_equal(a, b) for a, b in zip(self.tr, other.tr))
            and all(np.array_equal(a, b) for a, b in zip(self.weyl, other.weyl))
        )

    __hash__ = None

    def __repr__(self):
        label = self.name or "MackeyFunctor"
        body = ", ".join(g.name() for g in reversed(self.levels))
        return f"<{label} p={self.p} n={self.n}: {body}>"

    def with_name(self, name: str | None) -> "MackeyFunctor":
        return MackeyFunctor(self.ctx, self.levels, self.res, self.tr, self.weyl, name=name)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        M = _torsion_first(self)
        return {
            "p": M.p,
            "n": M.n,
            "levels": [
                {"rank": g.free_rank, "torsion": [d for d in g.moduli if d]} for g in M.levels
            ],
            "res": [_tolist(r) for r in M.res],
            "tr": [_tolist(t) for t in M.tr],
            "weyl": [_tolist(w) for w in M.weyl],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MackeyFunctor":
        ctx = GroupContext(int(d["p"]), int(d["n"]))
        levels = [
            PresentedGroup.diagonal(tuple(lv["torsion"]) + (0,) * int(lv["rank"])) for lv in d["levels"]
        ]
        res = [_frommat(r, levels[m].gens, levels[m + 1].gens) for m, r in enumerate(d["res"])]
        tr = [_frommat(t, levels[m + 1].gens, levels[m].gens) for m, t in enumerate(d["tr"])]
        weyl = [_frommat(w, levels[m].gens, levels[m].gens) for m, w in enumerate(d["weyl"])]
        return cls(ctx, levels, res, tr, weyl)

    @classmethod
    def from_json(cls, s: str) -> "MackeyFunctor":
        return cls.from_dict(json.loads(s))


def _tolist(X: np.ndarray) -> list:
    return [[int(x) for x in row] for row in X]


def _frommat(rows, r, c) -> np.ndarray:
    if r == 0 or c == 0:
        return zeros(r, c)
    return imat(rows, (r, c))


def _torsion_first(M: MackeyFunctor) -> MackeyFunctor:
    perms = []
    for g in M.levels:
        tors = [i for i, d in enumerate(g.moduli) if d]
        free = [i for i, d in enumerate(g.moduli) if not d]
        perms.append(tors + free)
    if all(P == list(range(len(P))) for P in perms):
        return M
    levels = [PresentedGroup.diagonal(tuple(g.moduli[i] for i in P)) for g, P in zip(M.levels, perms)]
    res = [M.res[m][np.ix_(perms[m], perms[m + 1])] for m in range(M.n)]
    tr = [M.tr[m][np.ix_(perms[m + 1], perms[m])] for m in range(M.n)]
    weyl = [M.weyl[m][np.ix_(perms[m], perms[m])] for m in range(M.n + 1)]
    return MackeyFunctor(M.ctx, levels, res, tr, weyl, name=M.name)


# --------------------------------------------------------------------------
# Morphisms
# --------------------------------------------------------------------------


class MackeyMorphism:
    """Levelwise homomorphisms ``maps[m]: source.levels[m] -> target.levels[m]``."""

    def __init__(self, source: MackeyFunctor, target: MackeyFunctor, maps):
        if source.ctx != target.ctx:
            raise ValueError("morphism between functors for different groups")
        maps = list(maps)
        if len(maps) != source.n + 1:
            raise ValueError("need one map per level")
        out = []
        for m, f in enumerate(maps):
            f = f if isinstance(f, np.ndarray) else imat(f, (target.gens(m), source.gens(m)))
            _check_shape(f, target.gens(m), source.gens(m), f"map[{m}]")
            out.append(_reduce(target.levels[m], f))
        self.source = source
        self.target = target
        self.maps = tuple(out)

    @classmethod
    def identity(cls, M: MackeyFunctor) -> "MackeyMorphism":
        return cls(M, M, [identity(M.gens(m)) for m in range(M.n + 1)])

    @classmethod
    def zero(cls, M: MackeyFunctor, N: MackeyFunctor) -> "MackeyMorphism":
        return cls(M, N, [zeros(N.gens(m), M.gens(m)) for m in range(M.n + 1)])

    def __matmul__(self, other: "MackeyMorphism") -> "MackeyMorphism":
        if other.target is not self.source and not (other.target == self.source):
            raise ValueError("cannot compose: target/source mismatch")
        return MackeyMorphism(other.source, self.target, [_mul(a, b) for a, b in zip(self.maps, other.maps)])

    def __add__(self, other):
        return MackeyMorphism(self.source, self.target, [a + b for a, b in zip(self.maps, other.maps)])

    def __sub__(self, other):
        return MackeyMorphism(self.source, self.target, [a - b for a, b in zip(self.maps, other.maps)])

    def __neg__(self):
        return MackeyMorphism(self.source, self.target, [-a for a in self.maps])

    def scaled(self, c: int) -> "MackeyMorphism":
        return MackeyMorphism(self.source, self.target, [c * a for a in self.maps])

    def hom(self, m: int) -> GroupHom:
        return GroupHom(self.source.levels[m], self.target.levels[m], self.maps[m])

    def is_zero(self) -> bool:
        return all(self.target.levels[m].contains_relations(f) for m, f in enumerate(self.maps))

    def __eq__(self, other):
        if not isinstance(other, MackeyMorphism):
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.maps, other.maps))

    __hash__ = None

    def violations(self) -> list[str]:
        """Levels where this fails to be a morphism of Mackey functors."""
        M, N = self.source, self.target
        bad = []
        for m in range(M.n + 1):
            if not self.hom(m).is_well_defined():
                bad.append(f"level {m}: map is not a well-defined homomorphism")
            if not _equal_in(N.levels[m], _mul(self.maps[m], M.weyl[m]), _mul(N.weyl[m], self.maps[m])):
                bad.append(f"level {m}: does not commute with weyl")
        for m in range(M.n):
            if not _equal_in(N.levels[m], _mul(self.maps[m], M.res[m]), _mul(N.res[m], self.maps[m + 1])):
                bad.append(f"level {m}: does not commute with res")
            if not _equal_in(N.levels[m + 1], _mul(self.maps[m + 1], M.tr[m]), _mul(N.tr[m], self.maps[m])):
                bad.append(f"level {m}: does not commute with tr")
        return bad

    def is_valid(self) -> bool:
        return not self.violations()

    def is_isomorphism(self) -> bool:
        for m in range(self.source.n + 1):
            f = self.hom(m)
            if not kernel(f)[0].is_zero():
                return False
            if not cokernel_witness(f)[0].is_zero():
                return False
        return True


def _equal_in(group: PresentedGroup, A: np.ndarray, B: np.ndarray) -> bool:
    return group.contains_relations(A - B)


# --------------------------------------------------------------------------
# Axioms
# --------------------------------------------------------------------------


def check_axioms(M: MackeyFunctor) -> list[str]:
    """List every violated Mackey-functor identity (empty when M is valid)."""
    ctx, n, p = M.ctx, M.n, M.p
    bad = []
    for m in range(n):
        if not GroupHom(M.levels[m + 1], M.levels[m], M.res[m]).is_well_defined():
            bad.append(f"level {m}: res is not a well-defined homomorphism")
        if not GroupHom(M.levels[m], M.levels[m + 1], M.tr[m]).is_well_defined():
            bad.append(f"level {m}: tr is not a well-defined homomorphism")
    for m in range(n + 1):
        g = M.levels[m]
        if not GroupHom(g, g, M.weyl[m]).is_well_defined():
            bad.append(f"level {m}: weyl is not a well-defined homomorphism")
        one = identity(g.gens)
        if not _equal_in(g, _power(M, m, ctx.index(m)), one):
            bad.append(f"level {m}: weyl^{ctx.index(m)} is not the identity")
    for m in range(n):
        lo, hi = M.levels[m], M.levels[m + 1]
        if not _equal_in(lo, _mul(M.res[m], M.weyl[m + 1]), _mul(M.weyl[m], M.res[m])):
            bad.append(f"level {m}: res does not commute with weyl")
        if not _equal_in(hi, _mul(M.weyl[m + 1], M.tr[m]), _mul(M.tr[m], M.weyl[m])):
            bad.append(f"level {m}: tr does not commute with weyl")
        step = ctx.index(m + 1)  # gamma^step generates C_{p^{m+1}}/C_{p^m}
        c = M.weyl_pow(m, step)
        if not _equal_in(hi, _mul(M.tr[m], c), M.tr[m]):
            bad.append(f"level {m}: tr is not invariant under C_{p ** (m + 1)}")
        if not _equal_in(lo, _mul(c, M.res[m]), M.res[m]):
            bad.append(f"level {m}: res does not land in C_{p ** (m + 1)}-invariants")
        norm = zeros(lo.gens, lo.gens)
        for i in range(p):
            norm = norm + M.weyl_pow(m, i * step)
        if not _equal_in(lo, _mul(M.res[m], M.tr[m]), norm):
            bad.append(f"level {m}: double coset formula res.tr = norm fails")
    return bad


def _power(M: MackeyFunctor, m: int, e: int) -> np.ndarray:
    # honest power, not reduced modulo the expected order
    g = M.levels[m]
    out = identity(g.gens)
    base = M.weyl[m]
    while e:
        if e & 1:
            out = _reduce(g, _mul(out, base))
        base = _reduce(g, _mul(base, base))
        e >>= 1
    return out


# --------------------------------------------------------------------------
# Named families
# --------------------------------------------------------------------------


def _cyc(order: int) -> PresentedGroup:
    """Z for order 0, Z/order for order > 1, and the zero group for 1."""
    if order == 1:
        return PresentedGroup.zero()
    return PresentedGroup.diagonal((order,))


def _scalar(c: int, tgt: PresentedGroup, src: PresentedGroup) -> np.ndarray:
    X = zeros(tgt.gens, src.gens)
    if tgt.gens and src.gens:
        X[0, 0] = c
    return X


def _cyclic_functor(ctx, orders, res_scalars, tr_scalars, name=None) -> MackeyFunctor:
    levels = [_cyc(o) for o in orders]
    res = [_scalar(res_scalars[m], levels[m], levels[m + 1]) for m in range(ctx.n)]
    tr = [_scalar(tr_scalars[m], levels[m + 1], levels[m]) for m in range(ctx.n)]
    return MackeyFunctor(ctx, levels, res, tr, name=name)


def zero_functor(ctx: GroupContext) -> MackeyFunctor:
    return _cyclic_functor(ctx, [1] * (ctx.n + 1), [0] * ctx.n, [0] * ctx.n, name="0")


def make_Z(k: int, j: int, ctx: GroupContext) -> MackeyFunctor:
    """The Z-valued functor Z(k, j): restriction is p exactly across levels j..k."""
    if not 0 <= j <= k <= ctx.n:
        raise IndexError(f"Z(k,j) needs 0 <= j <= k <= n, got k={k}, j={j}, n={ctx.n}")
    p = ctx.p
    res = [p if j <= s < k else 1 for s in range(ctx.n)]
    tr = [1 if r == p else p for r in res]
    name = "Z" if j == k else f"Z({k},{j})"
    return _cyclic_functor(ctx, [0] * (ctx.n + 1), res, tr, name=name)


def _clamp(x: int, n: int) -> int:
    return min(max(x, 0), n)


def _b_orders(k: int, j: int, ctx: GroupContext) -> list[int]:
    p = ctx.p
    return [p ** min(k, max(0, m - j)) for m in range(ctx.n + 1)]


def make_B_ell(k: int, j: int, ell: int, ctx: GroupContext) -> MackeyFunctor:
    """The hybrid B^ell_{k,j}: shaped like B_{k,j} below level ell+k+j, like B*_{k,j} above.

    For -k <= ell < 0 this is the dual B*_{k+ell, j}; that is the reading
    under which the cokernel of gamma - 1 on Ind_l Res_l B_k is B^(l-k)_k
    for l < k. Indices past n are clamped to n.
    """
    if ell < -k:
        raise IndexError(f"B^ell_(k,j) needs ell >= -k, got ell={ell}, k={k}")
    if k < 0 or j < 0:
        raise IndexError("B indices must be non-negative")
    n, p = ctx.n, ctx.p
    name = f"Bl({k},{j},{ell})"
    if ell < 0:
        k, ell = k + ell, 0
    switch = ell + k + j
    k, j = _clamp(k, n), _clamp(j, n)
    orders = _b_orders(k, j, ctx)
    res, tr = [], []
    for s in range(n):
        if s >= switch:
            # B*-shape between levels s and s+1
            res.append(p)
            tr.append(1)
        else:
            res.append(1)
            tr.append(p)
    return _cyclic_functor(ctx, orders, res, tr, name=name)


def make_B(k: int, j: int, ctx: GroupContext) -> MackeyFunctor:
    """B_{k,j}: Z/p^min(k, m-j) at level m, canonical quotients as res, p as tr."""
    if k < 0 or j < 0:
        raise IndexError("B indices must be non-negative")
    k, j = _clamp(k, ctx.n), _clamp(j, ctx.n)
    return make_B_ell(k, j, ctx.n + 1, ctx).with_name(_b_name(k, j))


def make_B_star(k: int, j: int, ctx: GroupContext) -> MackeyFunctor:
    """B*_{k,j}: as B_{k,j} up to level k+j, with res = p and tr = 1 above it."""
    if k < 0 or j < 0:
        raise IndexError("B indices must be non-negative")
    k, j = _clamp(k, ctx.n), _clamp(j, ctx.n)
    return make_B_ell(k, j, 0, ctx).with_name("0" if k == 0 else f"B*({k},{j})")


def _b_name(k, j) -> str:
    return "0" if k == 0 else f"B({k},{j})"


def make_fixed_point_permutation(k: int, ctx: GroupContext) -> MackeyFunctor:
    """Fixed-point functor of the permutation module Z[G/C_{p^k}].

    Level m has the orbit sums of C_{p^m} on G/C_{p^k} as basis. Restriction
    includes fixed points, transfer is the relative norm, gamma permutes.
    """
    if not 0 <= k <= ctx.n:
        raise IndexError(f"permutation module index out of range: {k}")
    n, p = ctx.n, ctx.p
    q = ctx.index(k)  # |G/C_{p^k}|

    def nbasis(m):
        return q if m <= k else ctx.index(m)

    levels = [PresentedGroup.free(nbasis(m)) for m in range(n + 1)]
    res, tr, weyl = [], [], []
    for m in range(n + 1):
        W = zeros(nbasis(m), nbasis(m))
        for i in range(nbasis(m)):
            W[(i + 1) % nbasis(m), i] = 1
        weyl.append(W)
    for m in range(n):
        lo, hi = nbasis(m), nbasis(m + 1)
        R, T = zeros(lo, hi), zeros(hi, lo)
        if m + 1 <= k:
            for i in range(lo):
                R[i, i] = 1
                T[i, i] = p
        else:
            for i in range(lo):
                R[i, i % hi] = 1
                T[i % hi, i] = 1
        res.append(R)
        tr.append(T)
    name = "Z" if k == n else f"perm({k})"
    return MackeyFunctor(ctx, levels, res, tr, weyl, name=name)


# --------------------------------------------------------------------------
# Restriction, induction, inflation
# --------------------------------------------------------------------------


def restrict(h: int, M: MackeyFunctor) -> MackeyFunctor:
    """Res to C_{p^h}: levels 0..h, with gamma_H = gamma^(p^(n-h))."""
    if not 0 <= h <= M.n:
        raise IndexError(f"restriction level {h} out of range 0..{M.n}")
    sub = GroupContext(M.p, h)
    step = M.ctx.index(h)
    weyl = [M.weyl_pow(m, step) for m in range(h + 1)]
    name = f"Res_{h}({M.name})" if M.name else None
    return MackeyFunctor(sub, M.levels[: h + 1], M.res[:h], M.tr[:h], weyl, name=name)


def _assemble(N: MackeyFunctor, src_blocks, tgt_blocks, entries, mode) -> np.ndarray:
    """Block matrix for a map between sums of copies of levels of N.

    ``src_blocks``/``tgt_blocks`` are lists of N-levels (one per orbit).
    ``entries`` lists ``(d, d2, c)``: orbit d of the source maps to orbit d2
    of the target through projection composed with gamma^c. ``push`` builds
    the covariant map (transfers), ``pull`` the contravariant one
    (restrictions), which goes from target blocks back to source blocks.
    """
    def offsets(blocks):
        off, out = 0, []
        for L in blocks:
            out.append(off)
            off += N.gens(L)
        return out, off

    so, stot = offsets(src_blocks)
    to, ttot = offsets(tgt_blocks)
    if mode == "push":
        X = zeros(ttot, stot)
    else:
        X = zeros(stot, ttot)
    for d, d2, c in entries:
        L, L2 = src_blocks[d], tgt_blocks[d2]
        if L > L2:
            raise ValueError("orbit map must go to a larger stabilizer")
        if mode == "push":
            blk = _mul(N.weyl_pow(L2, c), N.tr_between(L, L2))
            X[to[d2]: to[d2] + N.gens(L2), so[d]: so[d] + N.gens(L)] += blk
        else:
            blk = _mul(N.res_between(L2, L), N.weyl_pow(L2, -c))
            X[so[d]: so[d] + N.gens(L), to[d2]: to[d2] + N.gens(L2)] += blk
    return X


def induce(h: int, N: MackeyFunctor, ctx: GroupContext) -> MackeyFunctor:
    """Ind from C_{p^h} to C_{p^n}: the value at G/K is N on the C_{p^h}-set G/K."""
    if N.n != h or N.p != ctx.p or not 0 <= h <= ctx.n:
        raise ValueError(f"cannot induce a C_{N.p}^{N.n} functor from level {h} of {ctx}")
    n = ctx.n
    step = ctx.index(h)  # gamma_H = gamma^step

    def blocks(m):
        # H-orbits on G/C_{p^m}
        if m <= h:
            return [m] * step
        return [h] * ctx.index(m)

    def locate(m, b):
        if m <= h:
            d = b % step
            return d, ((b - d) // step) % (N.ctx.index(m))
        return b % ctx.index(m), 0

    levels = [
        PresentedGroup.diagonal(sum((N.levels[L].moduli for L in blocks(m)), ())) for m in range(n + 1)
    ]
    weyl, res, tr = [], [], []
    for m in range(n + 1):
        ents = []
        for d in range(len(blocks(m))):
            d2, c = locate(m, d + 1)
            ents.append((d, d2, c))
        weyl.append(_assemble(N, blocks(m), blocks(m), ents, "push"))
    for m in range(n):
        ents = []
        for d in range(len(blocks(m))):
            d2, c = locate(m + 1, d)
            ents.append((d, d2, c))
        tr.append(_assemble(N, blocks(m), blocks(m + 1), ents, "push"))
        res.append(_assemble(N, blocks(m), blocks(m + 1), ents, "pull"))
    name = f"Ind_{h}({N.name})" if N.name else None
    return MackeyFunctor(ctx, levels, res, tr, weyl, name=name)


def inflate(j: int, M: MackeyFunctor, ctx: GroupContext | None = None) -> MackeyFunctor:
    """Pull back along C_{p^n} -> C_{p^n}/C_{p^j}: zeros at levels below j."""
    if j < 0:
        raise IndexError("inflation index must be non-negative")
    ctx = ctx or GroupContext(M.p, M.n + j)
    if ctx.n != M.n + j or ctx.p != M.p:
        raise ValueError("inflation target does not match")
    zero = PresentedGroup.zero()
    levels = [zero] * j + list(M.levels)
    res = [zeros(levels[m].gens, levels[m + 1].gens) for m in range(j)] + list(M.res)
    tr = [zeros(levels[m + 1].gens, levels[m].gens) for m in range(j)] + list(M.tr)
    weyl = [zeros(0, 0)] * j + list(M.weyl)
    if j == 0:
        return M
    name = f"Inf_{j}({M.name})" if M.name else None
    return MackeyFunctor(ctx, levels, res, tr, weyl, name=name)


# The "IndRes" model used for cellular chains: (Ind_H Res_H M)(X) = M(G/H x X).
# Points of G/C_{p^h} x G/C_{p^m} are pairs (a mod p^(n-h), b mod p^(n-m)).
# Orbits are indexed by d in range(p^(n - max(h, m))) with representative
# (d, 0); the stabilizer level is min(h, m).


def _y_blocks(ctx, h, m):
    return [min(h, m)] * ctx.index(max(h, m))


def _y_locate(ctx, h, m, a, b):
    """Orbit d and shift c with (a, b) = c.(1, 1) + (d, 0)."""
    if m >= h:
        d = (a - b) % ctx.index(m)
        return d, (a - d) % ctx.index(h)
    d = (a - b) % ctx.index(h)
    return d, b % ctx.index(m)


def _y_map(M, src, tgt, F, mode):
    ctx = M.ctx
    (h, m), (h2, m2) = src, tgt
    ents = []
    for d in range(ctx.index(max(h, m))):
        a2, b2 = F(d, 0)
        d2, c = _y_locate(ctx, h2, m2, a2 % ctx.index(h2), b2 % ctx.index(m2))
        ents.append((d, d2, c))
    return _assemble(M, _y_blocks(ctx, h, m), _y_blocks(ctx, h2, m2), ents, mode)


def _y_level(M, h, m) -> PresentedGroup:
    return PresentedGroup.diagonal(sum((M.levels[L].moduli for L in _y_blocks(M.ctx, h, m)), ()))


def ind_res(h: int, M: MackeyFunctor) -> MackeyFunctor:
    """Ind_{C_{p^h}} Res_{C_{p^h}} M, realized as X -> M(G/C_{p^h} x X)."""
    if not 0 <= h <= M.n:
        raise IndexError(f"level {h} out of range")
    ctx, n = M.ctx, M.n
    if h == n:
        return M
    levels = [_y_level(M, h, m) for m in range(n + 1)]
    weyl = [_y_map(M, (h, m), (h, m), lambda a, b: (a, b + 1), "push") for m in range(n + 1)]
    res, tr = [], []
    for m in range(n):
        F = lambda a, b: (a, b)
        tr.append(_y_map(M, (h, m), (h, m + 1), F, "push"))
        res.append(_y_map(M, (h, m), (h, m + 1), F, "pull"))
    name = f"IndRes_{h}({M.name})" if M.name else None
    return MackeyFunctor(ctx, levels, res, tr, weyl, name=name)


def ind_res_shift(h: int, M: MackeyFunctor, IR: MackeyFunctor | None = None) -> MackeyMorphism:
    """The automorphism of Ind_h Res_h M induced by gH -> g.gamma.H on G/C_{p^h}."""
    IR = IR if IR is not None else ind_res(h, M)
    if h == M.n:
        return MackeyMorphism.identity(IR)
    maps = [_y_map(M, (h, m), (h, m), lambda a, b: (a + 1, b), "push") for m in range(M.n + 1)]
    return MackeyMorphism(IR, IR, maps)


def counit(h: int, M: MackeyFunctor, IR: MackeyFunctor | None = None) -> MackeyMorphism:
    """Ind_h Res_h M -> M, induced by the projection G/C_{p^h} -> G/G."""
    IR = IR if IR is not None else ind_res(h, M)
    if h == M.n:
        return MackeyMorphism.identity(M)
    n = M.n
    maps = [_y_map(M, (h, m), (n, m), lambda a, b: (0, b), "push") for m in range(n + 1)]
    return MackeyMorphism(IR, M, maps)


def unit(h: int, M: MackeyFunctor, IR: MackeyFunctor | None = None) -> MackeyMorphism:
    """M -> Ind_h Res_h M: restriction to C_{p^h} followed by the diagonal."""
    IR = IR if IR is not None else ind_res(h, M)
    if h == M.n:
        return MackeyMorphism.identity(M)
    n = M.n
    maps = [_y_map(M, (h, m), (n, m), lambda a, b: (0, b), "pull") for m in range(n + 1)]
    return MackeyMorphism(M, IR, maps)


def ind_res_pullback(j: int, k: int, M: MackeyFunctor, src=None, tgt=None) -> MackeyMorphism:
    """Ind_k Res_k M -> Ind_j Res_j M for j <= k (pull back along G/C_{p^j} -> G/C_{p^k}).

    For M = Z this is the inclusion of fixed points Z[G/C_{p^k}] -> Z[G/C_{p^j}].
    """
    if not 0 <= j <= k <= M.n:
        raise IndexError("need 0 <= j <= k <= n")
    src = src if src is not None else ind_res(k, M)
    tgt = tgt if tgt is not None else ind_res(j, M)
    maps = [
        _y_map(M, (j, m), (k, m), lambda a, b: (a, b), "pull") for m in range(M.n + 1)
    ]
    return MackeyMorphism(src, tgt, maps)


def direct_sum(*Ms: MackeyFunctor) -> MackeyFunctor:
    """Levelwise direct sum (generators concatenated in argument order)."""
    if not Ms:
        raise ValueError("empty direct sum")
    ctx = Ms[0].ctx
    if len(Ms) == 1:
        return Ms[0]
    n = ctx.n
    levels = [PresentedGroup.diagonal(sum((M.levels[m].moduli for M in Ms), ())) for m in range(n + 1)]

    def blockdiag(mats, rows, cols):
        X = zeros(rows, cols)
        r = c = 0
        for A in mats:
            X[r: r + A.shape[0], c: c + A.shape[1]] = A
            r += A.shape[0]
            c += A.shape[1]
        return X

    res = [blockdiag([M.res[m] for M in Ms], levels[m].gens, levels[m + 1].gens) for m in range(n)]
    tr = [blockdiag([M.tr[m] for M in Ms], levels[m + 1].gens, levels[m].gens) for m in range(n)]
    weyl = [blockdiag([M.weyl[m] for M in Ms], levels[m].gens, levels[m].gens) for m in range(n + 1)]
    return MackeyFunctor(ctx, levels, res, tr, weyl)


def block_morphism(source: MackeyFunctor, sources, target: MackeyFunctor, targets, grid) -> MackeyMorphism:
    """Assemble a morphism between direct sums from a grid of component morphisms.

    ``grid[i][j]`` is a MackeyMorphism sources[j] -> targets[i] or None (zero).
    """
    n = source.n
    maps = []
    for m in range(n + 1):
        X = zeros(target.gens(m), source.gens(m))
        r = 0
        for i, T in enumerate(targets):
            c = 0
            for j, S in enumerate(sources):
                f = grid[i][j]
                if f is not None:
                    X[r: r + T.gens(m), c: c + S.gens(m)] = f.maps[m]
                c += S.gens(m)
            r += T.gens(m)
        maps.append(X)
    return MackeyMorphism(source, target, maps)


# --------------------------------------------------------------------------
# Kernels, cokernels, homology
# --------------------------------------------------------------------------


def _subquotient_functor(ctx, sqs, ambient: MackeyFunctor) -> MackeyFunctor:
    n = ctx.n
    levels = [sq.group for sq in sqs]
    res = [induced_hom(ambient.res[m], sqs[m + 1], sqs[m]).matrix for m in range(n)]
    tr = [induced_hom(ambient.tr[m], sqs[m], sqs[m + 1]).matrix for m in range(n)]
    weyl = [induced_hom(ambient.weyl[m], sqs[m], sqs[m]).matrix for m in range(n + 1)]
    return MackeyFunctor(ctx, levels, res, tr, weyl)


@dataclass(eq=False)
class MackeySubquotient:
    """Levelwise ``ker(f_out) / im(f_in)`` with the witnesses used to build it."""

    functor: MackeyFunctor
    ambient: MackeyFunctor
    witnesses: tuple

    def induced(self, f: MackeyMorphism, other: "MackeySubquotient") -> MackeyMorphism:
        maps = [
            induced_hom(f.maps[m], self.witnesses[m], other.witnesses[m]).matrix
            for m in range(self.ambient.n + 1)
        ]
        return MackeyMorphism(self.functor, other.functor, maps)


def mackey_homology(f_in: MackeyMorphism, f_out: MackeyMorphism) -> MackeySubquotient:
    """Homology at the middle of ``A --f_in--> B --f_out--> C``, levelwise."""
    B = f_out.source
    sqs = tuple(homology_at(f_in.hom(m), f_out.hom(m))[1] for m in range(B.n + 1))
    return MackeySubquotient(_subquotient_functor(B.ctx, sqs, B), B, sqs)


def mackey_kernel(f: MackeyMorphism) -> tuple[MackeyFunctor, MackeyMorphism]:
    """Kernel functor with its inclusion into ``f.source``."""
    zero_in = MackeyMorphism.zero(zero_functor(f.source.ctx), f.source)
    sq = mackey_homology(zero_in, f)
    inc = MackeyMorphism(sq.functor, f.source, [w.lifts() for w in sq.witnesses])
    return sq.functor, inc


def mackey_cokernel(f: MackeyMorphism) -> tuple[MackeyFunctor, MackeyMorphism]:
    """Cokernel functor with the projection from ``f.target``."""
    zero_out = MackeyMorphism.zero(f.target, zero_functor(f.target.ctx))
    sq = mackey_homology(f, zero_out)
    proj = MackeyMorphism(f.target, sq.functor, [w.projection().matrix for w in sq.witnesses])
    return sq.functor, proj


# --------------------------------------------------------------------------
# Hom groups and isomorphism testing
# --------------------------------------------------------------------------


def standardize(M: MackeyFunctor) -> tuple[MackeyFunctor, MackeyMorphism, MackeyMorphism]:
    """An isomorphic copy with canonical levels, plus the isos both ways."""
    n = M.n
    can = [g._canonical for g in M.levels]
    levels = [PresentedGroup.standard(c[0]) for c in can]
    to = [c[1] for c in can]
    fr = [c[2] for c in can]
    res = [_mul(to[m], _mul(M.res[m], fr[m + 1])) for m in range(n)]
    tr = [_mul(to[m + 1], _mul(M.tr[m], fr[m])) for m in range(n)]
    weyl = [_mul(to[m], _mul(M.weyl[m], fr[m])) for m in range(n + 1)]
    S = MackeyFunctor(M.ctx, levels, res, tr, weyl, name=M.name)
    return S, MackeyMorphism(M, S, to), MackeyMorphism(S, M, fr)


def _hom_entry(a: int, b: int) -> tuple[int, int] | None:
    """(multiplier, order) parametrizing Hom(Z/a, Z/b); None when it is zero."""
    if b == 0:
        return (1, 0) if a == 0 else None
    if a == 0:
        return (1, b)
    g = math.gcd(a, b)
    if g == 1:
        return None
    return (b // g, g)


def hom_group(M: MackeyFunctor, N: MackeyFunctor) -> tuple[PresentedGroup, list[MackeyMorphism]]:
    """Hom(M, N) as an abelian group, with morphisms lifting its generators."""
    if M.ctx != N.ctx:
        raise ValueError("functors for different groups")
    n = M.n
    # unknowns: entry (m, i, j) = mult * t, t in Z/order
    unknowns = []
    for m in range(n + 1):
        for i, b in enumerate(N.levels[m].moduli):
            for j, a in enumerate(M.levels[m].moduli):
                e = _hom_entry(a, b)
                if e is not None:
                    unknowns.append((m, i, j, e[0], e[1]))

    def generic(m, k):
        """f_m with unknown k set to its multiplier and all others zero."""
        F = zeros(N.gens(m), M.gens(m))
        mm, i, j, mult, _ = unknowns[k]
        if mm == m:
            F[i, j] = mult
        return F

    # equations: each is an element of some N-level; collect columns per unknown
    rows_moduli = []
    blocks = []  # list of (level, function(k) -> matrix) for constraint families
    for m in range(n + 1):
        blocks.append((m, M.gens(m), lambda k, m=m: _mul(generic(m, k), M.weyl[m]) - _mul(N.weyl[m], generic(m, k))))
    for m in range(n):
        blocks.append((m, M.gens(m + 1), lambda k, m=m: _mul(generic(m, k), M.res[m]) - _mul(N.res[m], generic(m + 1, k))))
        blocks.append((m + 1, M.gens(m), lambda k, m=m: _mul(generic(m + 1, k), M.tr[m]) - _mul(N.tr[m], generic(m, k))))
    for lvl, ncols, _ in blocks:
        rows_moduli.extend(N.levels[lvl].moduli * ncols)
    A = zeros(len(rows_moduli), len(unknowns))
    for k in range(len(unknowns)):
        col = []
        for lvl, ncols, fn in blocks:
            X = fn(k)
            col.extend(X[:, c] for c in range(ncols))
        flat = [int(x) for v in col for x in v]
        for r, x in enumerate(flat):
            A[r, k] = x
    src = PresentedGroup.diagonal(tuple(u[4] for u in unknowns)) if unknowns else PresentedGroup.zero()
    tgt = PresentedGroup.diagonal(tuple(d for d in rows_moduli if d != 1)) if rows_moduli else PresentedGroup.zero()
    keep = [r for r, d in enumerate(rows_moduli) if d != 1]
    A = A[keep, :]
    _, sq = kernel(GroupHom(src, tgt, A))
    gens = []
    lifts = sq.lifts()
    for g in range(sq.group.gens):
        t = lifts[:, g]
        maps = []
        for m in range(n + 1):
            F = zeros(N.gens(m), M.gens(m))
            maps.append(F)
        for k, (m, i, j, mult, _) in enumerate(unknowns):
            maps[m][i, j] += mult * t[k]
        gens.append(MackeyMorphism(M, N, maps))
    return sq.group, gens


@dataclass
class IsoVerdict:
    isomorphic: bool
    witness: MackeyMorphism | None = None
    reason: str = ""
    complete: bool = True

    def __bool__(self):
        return self.isomorphic


def _units(order: int):
    if order == 0:
        return [1, -1]
    return [u for u in range(1, order) if math.gcd(u, order) == 1] if order > 1 else [0]


def _cyclic_iso(A: MackeyFunctor, B: MackeyFunctor):
    """Unit search on canonical cyclic levels, bottom level first."""
    n = A.n
    orders = [g.orders[0] if g.orders else 1 for g in A.levels]

    def scal(X):
        return int(X[0, 0]) if X.size else 0

    def red(x, o):
        return x % o if o else x

    for m in range(n + 1):
        o = orders[m]
        if o != 1 and red(scal(A.weyl[m]) - scal(B.weyl[m]), o):
            return None
    choice = [0] * (n + 1)

    def ok(m):
        # constraints linking level m-1 and m
        lo, hi = m - 1, m
        ol, oh = orders[lo], orders[hi]
        ul, uh = choice[lo], choice[hi]
        if ol != 1 and red(ul * scal(A.res[lo]) - scal(B.res[lo]) * uh, ol):
            return False
        if oh != 1 and red(uh * scal(A.tr[lo]) - scal(B.tr[lo]) * ul, oh):
            return False
        return True

    def dfs(m):
        if m > n:
            return True
        for u in _units(orders[m]) if orders[m] != 1 else [0]:
            choice[m] = u
            if m == 0 or ok(m):
                if dfs(m + 1):
                    return True
        return False

    if not dfs(0):
        return None
    maps = []
    for m in range(n + 1):
        X = zeros(A.gens(m), A.gens(m))
        if A.gens(m):
            X[0, 0] = choice[m]
        maps.append(X)
    return MackeyMorphism(A, B, maps)


def mackey_iso(M: MackeyFunctor, N: MackeyFunctor, search_limit: int = 6561) -> IsoVerdict:
    """Decide whether M and N are isomorphic, producing a witness when they are.

    Functors with cyclic levels are decided exactly by a unit search. For
    larger levels the identity and then small integer combinations of Hom(M, N)
    generators are tried; a negative answer there is marked incomplete.
    """
    if M.ctx != N.ctx:
        return IsoVerdict(False, reason="different groups")
    for m in range(M.n + 1):
        if M.levels[m].orders != N.levels[m].orders:
            return IsoVerdict(
                False,
                reason=f"level {m} differs: {M.levels[m].name()} vs {N.levels[m].name()}",
            )
    if M == N:
        return IsoVerdict(True, MackeyMorphism.identity(M), "identical")
    A, toA, fromA = standardize(M)
    B, toB, fromB = standardize(N)
    if all(g.is_cyclic() for g in A.levels):
        phi = _cyclic_iso(A, B)
        if phi is None:
            return IsoVerdict(False, reason="no unit rescaling matches the structure maps")
        return IsoVerdict(True, fromB @ phi @ toA, "unit search")
    if A == B:
        return IsoVerdict(True, fromB @ toA, "identical after standardizing")
    _, gens = hom_group(A, B)
    tried = 0
    for r in range(1, len(gens) + 1):
        for idx in itertools.combinations(range(len(gens)), r):
            for signs in itertools.product((1, -1), repeat=r):
                if signs[0] != 1:
                    continue
                tried += 1
                if tried > search_limit:
                    return IsoVerdict(False, reason="search limit reached", complete=False)
                f = gens[idx[0]]
                for s, i in zip(signs[1:], idx[1:]):
                    f = f + gens[i].scaled(s)
                if f.is_isomorphism():
                    return IsoVerdict(True, fromB @ f @ toA, "hom search")
    return IsoVerdict(False, reason="no small combination of Hom generators is invertible", complete=False)


# --------------------------------------------------------------------------
# Lewis diagrams
# --------------------------------------------------------------------------


def _fmt_map(X: np.ndarray) -> str:
    if X.size == 0:
        return "0"
    if X.shape == (1, 1):
        return str(int(X[0, 0]))
    return "[" + "; ".join(" ".join(str(int(x)) for x in row) for row in X) + "]"


def lewis_diagram(M: MackeyFunctor) -> str:
    """Render M vertically, G/G at the top and G/e at the bottom."""
    ctx = M.ctx
    title = M.name or "M"
    lines = [f"{title}  (p={ctx.p}, n={ctx.n})"]
    width = max(len(ctx.level_name(m)) for m in range(ctx.n + 1))
    for m in range(ctx.n, -1, -1):
        g = M.levels[m]
        line = f"{ctx.level_name(m):<{width}}  {g.name()}"
        W = M.weyl[m]
        if g.gens and not np.array_equal(W, _reduce(g, identity(g.gens))):
            line += f"   gamma: {_fmt_map(W)}"
        lines.append(line)
        if m > 0:
            lines.append(f"{'':<{width}}    res {_fmt_map(M.res[m - 1])} | tr {_fmt_map(M.tr[m - 1])}")
    return "\n".join(lines)
