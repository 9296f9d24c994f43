"""Bredon homology of representation spheres.

``bredon_homology`` runs the cellular chain complex and is the reference
answer. ``closed_form_Bk`` predicts the answer for coefficients in B_k from
the multiplicities of V alone; ``verify_closed_form`` compares the two.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cells import chain_complex, cochain_complex, cochain_minus_lambda
from .library import identify
from .mackey import (
    MackeyFunctor,
    lewis_diagram,
    mackey_iso,
    make_B,
    make_B_star,
    zero_functor,
)
from .reps import RealRep

__all__ = [
    "HomologyTable",
    "ClosedFormIndex",
    "Prediction",
    "NormalizationRequired",
    "bredon_homology",
    "normalize_for_B",
    "closed_form_index",
    "closed_form_Bk",
    "verify_closed_form",
    "cohomology_H01",
    "cohomology_full",
    "p_local_violations",
    "worker_count",
    "parallel_map",
]


class NormalizationRequired(ValueError):
    """The closed form needs a fixed-point-free V with no lambda_0 summand."""


def worker_count() -> int:
    raw = os.environ.get("SLICECALC_THREADS", "").strip()
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"SLICECALC_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValueError(f"SLICECALC_THREADS must be a positive integer, got {raw!r}")
    return k


def parallel_map(fn, items):
    """Ordered map over ``items`` using up to SLICECALC_THREADS workers."""
    items = list(items)
    k = worker_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


@dataclass
class HomologyTable:
    """Nonzero homology functors of S^V by degree, with library names where known."""

    V: RealRep
    coefficient: str | None
    groups: dict[int, MackeyFunctor]
    names: dict[int, str | None] = field(default_factory=dict)

    def __getitem__(self, s: int) -> MackeyFunctor:
        return self.groups.get(s) or zero_functor(self.V.ctx)

    def degrees(self) -> list[int]:
        return sorted(self.groups)

    def top_degree(self) -> int | None:
        return max(self.groups) if self.groups else None

    def name(self, s: int) -> str | None:
        if s not in self.groups:
            return "0"
        if s not in self.names:
            self.names[s] = identify(self.groups[s])
        return self.names[s]

    def to_dict(self) -> dict:
        return {
            "p": self.V.ctx.p,
            "n": self.V.ctx.n,
            "rep": self.V.grammar(),
            "coefficient": self.coefficient,
            "degrees": [
                {"s": s, "name": self.name(s), "functor": self.groups[s].to_dict()} for s in self.degrees()
            ],
        }

    def text(self) -> str:
        head = f"H_*(S^{self.V.grammar()}; {self.coefficient or 'M'})  p={self.V.ctx.p} n={self.V.ctx.n}"
        if not self.groups:
            return head + "\n  all degrees zero"
        out = [head]
        for s in self.degrees():
            label = self.name(s) or "unnamed"
            body = lewis_diagram(self.groups[s].with_name(f"H_{s} = {label}"))
            out.append(body)
        return "\n\n".join(out)


def bredon_homology(V: RealRep, M: MackeyFunctor) -> HomologyTable:
    """Reduced Bredon homology of S^V with coefficients in M, computed from cells."""
    if M.is_zero():
        return HomologyTable(V, M.name, {})
    C = chain_complex(V, M)
    groups = {}
    for s in C.degrees():
        H = C.homology(s).functor
        if not H.is_zero():
            groups[s] = H
    bad = [s for s in groups if not 0 <= s <= V.dim]
    if bad:  # pragma: no cover - the cell structure lives in these degrees
        raise AssertionError(f"homology outside 0..dim V in degrees {bad}")
    return HomologyTable(V, M.name, groups)


def normalize_for_B(V: RealRep, j: int) -> tuple[RealRep, int]:
    """Drop what S^V ^ HB_{k,j} cannot see.

    Summands lambda_i with i <= j have stabilizers inside C_{p^j}, where
    B_{k,j} vanishes, so their Euler classes are equivalences. Trivial
    summands become a degree shift. Returns (V', shift).
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    mult = tuple(0 if i <= j else c for i, c in enumerate(V.mult))
    return RealRep(V.ctx, 0, mult), V.triv


@dataclass(frozen=True)
class ClosedFormIndex:
    """k_r = multiplicity of lambda_{n-r}; K_i = 2(k_1 + ... + k_i); support i_0 < ... < i_m; h_r = n - i_r."""

    n: int
    k: tuple[int, ...]  # k[r] for r = 0..n, k[0] unused
    K: tuple[int, ...]  # K[i] for i = 0..n
    support: tuple[int, ...]
    h: tuple[int, ...]


def closed_form_index(V: RealRep) -> ClosedFormIndex:
    n = V.ctx.n
    k = [0] * (n + 1)
    for r in range(1, n + 1):
        k[r] = V.mult[n - r]
    K = [0] * (n + 1)
    for i in range(1, n + 1):
        K[i] = K[i - 1] + 2 * k[i]
    support = tuple(i for i in range(1, n + 1) if k[i])
    return ClosedFormIndex(n, tuple(k), tuple(K), support, tuple(n - i for i in support))


@dataclass
class Prediction:
    """Closed-form value in one degree: a functor, or None when the formula is ambiguous there."""

    s: int
    functor: MackeyFunctor | None
    label: str
    rows: tuple[str, ...] = ()

    @property
    def ambiguous(self) -> bool:
        return self.functor is None


def _B(a, b, ctx):
    return make_B(a, b, ctx)


def _Bs(a, b, ctx):
    return make_B_star(a, b, ctx)


def closed_form_Bk(V: RealRep, k: int, literal: bool = False) -> dict[int, Prediction]:
    """Predicted H_s(S^V; B_k) for 0 <= s <= dim V.

    V must be fixed-point free with no lambda_0 summand (see
    ``normalize_for_B``). Degrees where the case list gives no value, or
    several different values, come back ambiguous.

    In degree K_{i_r} + 1 the value is the dual-shaped B*; ``literal=True``
    uses the unstarred B there instead. The two agree unless both indices
    add up to less than n, and the cellular computation picks B*.
    """
    ctx = V.ctx
    n = ctx.n
    if V.triv or V.mult[0]:
        raise NormalizationRequired(f"{V} has trivial or lambda_0 summands; call normalize_for_B first")
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return {s: Prediction(s, zero_functor(ctx), "0", ("B_0 = 0",)) for s in range(V.dim + 1)}
    idx = closed_form_index(V)
    if not idx.support:
        return {0: Prediction(0, make_B(k, 0, ctx), f"B({min(k, n)},0)", ("S^0",))}
    K, sup, h = idx.K, idx.support, idx.h
    m = len(sup) - 1
    top = K[sup[-1]]
    out = {}
    for s in range(top + 1):
        cands: list[tuple[str, tuple]] = []
        if s == 0:
            cands.append(("s=0", ("B", k, h[0])))
        if s == 1:
            cands.append(("s=1", ("B*", min(h[0], k), max(h[0], k))))
        for i in sup:
            hi = n - i
            if K[i - 1] + 2 <= s <= K[i] - 2 and s % 2 == 0:
                cands.append((f"even interior i={i}", ("B", min(k, hi), hi)))
            if K[i - 1] + 3 <= s <= K[i] - 1 and s % 2 == 1:
                cands.append((f"odd interior i={i}", ("B*", min(k, hi), hi)))
        for r, i in enumerate(sup):
            if s == K[i]:
                if r < m:
                    cands.append((f"s=K_i{r}", ("B", min(k, h[r]), h[r + 1])))
                else:
                    cands.append((f"s=K_i{r} (h_{r + 1} undefined)", None))
            if s == K[i] + 1:
                if r < m:
                    kind = "B" if literal else "B*"
                    cands.append((f"s=K_i{r}+1", (kind, min(k, h[r + 1]), max(min(k, h[r]), h[r + 1]))))
                else:
                    cands.append((f"s=K_i{r}+1 (h_{r + 1} undefined)", None))
        rows = tuple(c[0] for c in cands)
        vals = {c[1] for c in cands}
        if not cands:
            out[s] = Prediction(s, None, "no case applies", rows)
        elif None in vals:
            out[s] = Prediction(s, None, "undefined index", rows)
        elif len(vals) > 1:
            built = [(_B if kind == "B" else _Bs)(a, b, ctx) for kind, a, b in vals]
            if all(mackey_iso(built[0], x) for x in built[1:]):
                out[s] = Prediction(s, built[0], built[0].name, rows)
            else:
                out[s] = Prediction(s, None, "conflicting cases", rows)
        else:
            kind, a, b = vals.pop()
            F = (_B if kind == "B" else _Bs)(a, b, ctx)
            out[s] = Prediction(s, F, F.name, rows)
    return out


@dataclass
class CaseResult:
    rep: str
    k: int
    s: int
    verdict: str  # match | mismatch | ambiguous
    predicted: str | None
    oracle: str | None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "rep": self.rep,
            "k": self.k,
            "s": self.s,
            "verdict": self.verdict,
            "predicted": self.predicted,
            "oracle": self.oracle,
            "detail": self.detail,
        }


def verify_closed_form(
    V: RealRep, k: int, oracle: HomologyTable | None = None, literal: bool = False
) -> list[CaseResult]:
    """Compare the closed form against the cellular computation, degree by degree.

    V may be any actual representation; it is normalized before the closed
    form is evaluated, and the predicted degrees are shifted back.
    """
    ctx = V.ctx
    if oracle is None:
        oracle = bredon_homology(V, make_B(k, 0, ctx))
    W, shift = normalize_for_B(V, 0)
    pred = closed_form_Bk(W, k, literal=literal)
    results = []
    degrees = sorted(set(s + shift for s in pred) | set(oracle.degrees()))
    for s in degrees:
        got = oracle[s]
        got_name = oracle.name(s)
        P = pred.get(s - shift)
        if P is None:
            # outside the range the closed form covers: it predicts zero
            P = Prediction(s - shift, zero_functor(ctx), "0")
        if P.ambiguous:
            results.append(CaseResult(V.grammar(), k, s, "ambiguous", None, got_name, P.label))
            continue
        ok = mackey_iso(P.functor, got)
        if ok:
            results.append(CaseResult(V.grammar(), k, s, "match", P.label, got_name))
        else:
            detail = "predicted:\n" + lewis_diagram(P.functor) + "\noracle:\n" + lewis_diagram(got)
            results.append(CaseResult(V.grammar(), k, s, "mismatch", P.label, got_name, detail))
    return results


def cohomology_H01(V: RealRep, M: MackeyFunctor) -> tuple[MackeyFunctor, MackeyFunctor]:
    """H^0 and H^1 of S^V, read off the bottom cells (those of the largest-stabilizer lambda)."""
    ctx = V.ctx
    if not any(V.mult):
        raise ValueError(f"{V} has no lambda summand")
    zero = zero_functor(ctx)
    if V.triv >= 2:
        return zero, zero
    m = max(i for i, c in enumerate(V.mult) if c)
    C = cochain_minus_lambda(m, M)
    H0 = C.homology(0).functor
    if V.triv == 1:
        # S^V = S^1 ^ S^W: H^0 vanishes and H^1(S^V) = H^0(S^W)
        return zero, H0
    return H0, C.homology(-1).functor


def cohomology_full(V: RealRep, M: MackeyFunctor, s: int) -> MackeyFunctor:
    """H^s(S^V; M) from the full cellular cochain complex."""
    return cochain_complex(V, M).homology(s).functor


def p_local_violations(M: MackeyFunctor) -> list[tuple[int, int]]:
    """(level, order) for every torsion summand whose order is not a power of p."""
    p = M.p
    bad = []
    for m, g in enumerate(M.levels):
        for d in g.torsion:
            x = d
            while x % p == 0:
                x //= p
            if x != 1:
                bad.append((m, d))
    return bad
