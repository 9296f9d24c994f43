"""Cell structures on representation spheres and their Mackey chain complexes.

S^V is built from S^t (t the trivial dimension) by attaching, for each
lambda_h summand taken in order of decreasing stabilizer, a pair of cells
(G/C_{p^h})_+ ^ e^d and (G/C_{p^h})_+ ^ e^{d+1}. With coefficients in M
each such cell contributes Ind_h Res_h M. The even cell of a pair is
attached to the odd one by 1 - gamma; the odd cell of a pair wraps once
around the sphere built so far, which on chains is the counit to M followed
by the diagonal into the previous even cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .linalg import ChainComplexError
from .mackey import (
    GroupContext,
    MackeyFunctor,
    MackeyMorphism,
    MackeySubquotient,
    _y_map,
    block_morphism,
    counit,
    direct_sum,
    ind_res,
    ind_res_pullback,
    ind_res_shift,
    mackey_homology,
    unit,
    zero_functor,
)
from .reps import RealRep

__all__ = [
    "CellStructure",
    "MackeyComplex",
    "cell_structure",
    "chain_complex",
    "cochain_complex",
    "virtual_form_complex",
    "cochain_minus_lambda",
]


@dataclass(frozen=True)
class CellStructure:
    """Bottom sphere S^base_dim plus pairs of cells (h, d, d + 1) of type G/C_{p^h}."""

    base_dim: int
    blocks: tuple[tuple[int, int, int], ...]

    @property
    def dim(self) -> int:
        return self.blocks[-1][2] if self.blocks else self.base_dim

    @property
    def cell_count(self) -> int:
        return 1 + 2 * len(self.blocks)

    def stabilizers(self) -> list[int]:
        return [h for h, _, _ in self.blocks]


def cell_structure(V: RealRep) -> CellStructure:
    blocks = []
    d = V.triv
    for h in V.lambdas_descending():
        blocks.append((h, d + 1, d + 2))
        d += 2
    return CellStructure(V.triv, tuple(blocks))


@dataclass(eq=False)
class MackeyComplex:
    """Terms ``terms[d]`` with differentials ``diffs[d]: terms[d] -> terms[d-1]``.

    ``cohomological`` complexes have ``diffs[d]: terms[d] -> terms[d+1]``
    instead. Missing degrees are zero.
    """

    ctx: GroupContext
    terms: dict[int, MackeyFunctor]
    diffs: dict[int, MackeyMorphism]
    cohomological: bool = False
    _zero: MackeyFunctor = field(init=False, repr=False)

    def __post_init__(self):
        self._zero = zero_functor(self.ctx)
        self.check()

    @property
    def step(self) -> int:
        return 1 if self.cohomological else -1

    def term(self, d: int) -> MackeyFunctor:
        return self.terms.get(d, self._zero)

    def degrees(self) -> range:
        if not self.terms:
            return range(0)
        return range(min(self.terms), max(self.terms) + 1)

    def diff(self, d: int) -> MackeyMorphism:
        if d in self.diffs:
            return self.diffs[d]
        return MackeyMorphism.zero(self.term(d), self.term(d + self.step))

    def check(self):
        for d in self.degrees():
            f = self.diff(d)
            bad = f.violations()
            if bad:
                raise ChainComplexError(f"differential in degree {d} is not a morphism: {bad[0]}")
            g = self.diff(d + self.step)
            if not (g @ f).is_zero():
                raise ChainComplexError(f"d o d != 0 at degree {d}")

    def homology(self, d: int) -> MackeySubquotient:
        """H at degree d; for cohomological complexes this is H^d."""
        return mackey_homology(self.diff(d - self.step), self.diff(d))

    def level_homology_orders(self, m: int) -> dict[int, tuple[int, ...]]:
        out = {}
        for d in self.degrees():
            g = self.homology(d).functor.levels[m]
            if not g.is_zero():
                out[d] = g.orders
        return out

    def to_dict(self) -> dict:
        return {
            "p": self.ctx.p,
            "n": self.ctx.n,
            "cohomological": self.cohomological,
            "terms": {str(d): M.to_dict() for d, M in sorted(self.terms.items())},
            "diffs": {
                str(d): [[[int(x) for x in row] for row in f.maps[m]] for m in range(self.ctx.n + 1)]
                for d, f in sorted(self.diffs.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _one_minus(f: MackeyMorphism) -> MackeyMorphism:
    return MackeyMorphism.identity(f.source) - f


def chain_complex(V: RealRep, M: MackeyFunctor, check_underlying: bool = True) -> MackeyComplex:
    """Reduced cellular chains of S^V with coefficients in M."""
    if V.ctx != M.ctx:
        raise ValueError("representation and coefficients are for different groups")
    cells = cell_structure(V)
    t = V.triv
    terms = {t: M}
    diffs = {}
    prev = None  # (h, IndRes term) of the previous block
    for h, odd, even in cells.blocks:
        IR = ind_res(h, M)
        terms[odd] = IR
        terms[even] = IR
        diffs[even] = _one_minus(ind_res_shift(h, M, IR))
        eps = counit(h, M, IR)
        if prev is None:
            diffs[odd] = eps
        else:
            ph, PIR = prev
            diffs[odd] = unit(ph, M, PIR) @ eps
        prev = (h, IR)
    C = MackeyComplex(M.ctx, terms, diffs)
    if check_underlying:
        _check_underlying(C, M, cells.dim)
    return C


def _check_underlying(C: MackeyComplex, M: MackeyFunctor, top: int):
    # the underlying space is a sphere of dimension dim V
    expect = M.levels[0].orders
    got = C.level_homology_orders(0)
    want = {top: expect} if expect else {}
    if got != want:
        raise ChainComplexError(f"underlying homology {got} is not that of a {top}-sphere")


def cochain_complex(V: RealRep, M: MackeyFunctor) -> MackeyComplex:
    """Cellular cochains of S^V: the chain complex with pushes and pulls exchanged."""
    if V.ctx != M.ctx:
        raise ValueError("representation and coefficients are for different groups")
    cells = cell_structure(V)
    n = M.n
    t = V.triv
    terms = {t: M}
    diffs = {}
    prev = None
    for h, odd, even in cells.blocks:
        IR = ind_res(h, M)
        terms[odd] = IR
        terms[even] = IR
        inv_shift = MackeyMorphism(
            IR, IR, [_y_map(M, (h, m), (h, m), lambda a, b: (a + 1, b), "pull") for m in range(n + 1)]
        )
        diffs[odd] = _one_minus(inv_shift)
        eta = unit(h, M, IR)
        if prev is None:
            diffs[t] = eta
        else:
            ph, PIR = prev
            diffs[odd - 1] = eta @ counit(ph, M, PIR)
        prev = (h, IR)
    return MackeyComplex(M.ctx, terms, diffs, cohomological=True)


def cochain_minus_lambda(m: int, M: MackeyFunctor) -> MackeyComplex:
    """M -> Ind_m Res_m M -> Ind_m Res_m M in degrees 0, -1, -2.

    The first map is restriction to C_{p^m} followed by the diagonal. This is
    graded by the cells of S^{-lambda_m}, so the differential lowers degree.
    """
    ctx = M.ctx
    if not 0 <= m < ctx.n:
        raise IndexError(f"need 0 <= m < n, got m={m}")
    IR = ind_res(m, M)
    inv_shift = MackeyMorphism(
        IR, IR, [_y_map(M, (m, l), (m, l), lambda a, b: (a + 1, b), "pull") for l in range(ctx.n + 1)]
    )
    terms = {0: M, -1: IR, -2: IR}
    diffs = {0: unit(m, M, IR), -1: _one_minus(inv_shift)}
    return MackeyComplex(ctx, terms, diffs)


def virtual_form_complex(k: int, j: int, ctx: GroupContext) -> MackeyComplex:
    """Chains on S^{lambda_k} ^ S^{-lambda_j} with constant Z coefficients (j < k < n).

    Degree 2: Ind_k; degree 1: Ind_k + Ind_j; degree 0: Z + Ind_j, where
    Ind_h stands for Z[G/C_{p^h}] and the cross maps are the inclusions of
    fixed points P: Z[G/C_{p^k}] -> Z[G/C_{p^j}].
    """
    if not 0 <= j < k <= ctx.n - 1:
        raise IndexError(f"need 0 <= j < k <= n-1, got k={k}, j={j}, n={ctx.n}")
    from .mackey import make_Z

    Z = make_Z(ctx.n, ctx.n, ctx)
    Ik, Ij = ind_res(k, Z), ind_res(j, Z)
    P = ind_res_pullback(j, k, Z, Ik, Ij)
    dk = _one_minus(ind_res_shift(k, Z, Ik))
    dj = _one_minus(ind_res_shift(j, Z, Ij))
    eps = counit(k, Z, Ik)
    C1 = direct_sum(Ik, Ij)
    C0 = direct_sum(Z, Ij)
    d2 = block_morphism(Ik, [Ik], C1, [Ik, Ij], [[dk], [P]])
    d1 = block_morphism(C1, [Ik, Ij], C0, [Z, Ij], [[eps, None], [-P, dj]])
    return MackeyComplex(ctx, {2: Ik, 1: C1, 0: C0}, {2: d2, 1: d1})
