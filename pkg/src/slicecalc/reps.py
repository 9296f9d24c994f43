"""Real representations of C_{p^n} up to JO-equivalence.

A representation is stored as a trivial dimension plus multiplicities of the
two-dimensional irreducibles lambda_k = lambda(p^k), k = 0..n-1. p-locally
every lambda(r) is equivalent to lambda_{v_p(r)}, and lambda_n is the trivial
two-dimensional representation, so this data determines the sphere S^V.

The surface syntax is a sum of terms ``<c>t`` (trivial dimensions) and
``<c>l<k>`` (copies of lambda_k), e.g. ``2t+3l0+1l1``; ``0`` is the zero
representation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .mackey import GroupContext

__all__ = [
    "RealRep",
    "RepParseError",
    "jo_reduce",
    "rho",
    "rho_bar",
    "v_recursive",
    "v_floor",
    "v_coeffs_special",
    "special_coeffs_rep",
    "special_coeffs_bounds_ok",
    "special_form",
    "rep_identities_check",
    "parse_rep",
    "vp",
]


class RepParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def vp(p: int, r: int) -> int:
    """p-adic valuation; raises for r = 0."""
    if r == 0:
        raise ValueError("v_p(0) is infinite")
    r = abs(r)
    v = 0
    while r % p == 0:
        r //= p
        v += 1
    return v


@dataclass(frozen=True)
class RealRep:
    ctx: GroupContext
    triv: int
    mult: tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(x) for x in self.mult)
        object.__setattr__(self, "mult", mult)
        if len(mult) != self.ctx.n:
            raise ValueError(f"need {self.ctx.n} multiplicities, got {len(mult)}")
        if self.triv < 0 or any(x < 0 for x in mult):
            raise ValueError("multiplicities must be non-negative")

    @classmethod
    def zero(cls, ctx: GroupContext) -> "RealRep":
        return cls(ctx, 0, (0,) * ctx.n)

    @classmethod
    def lam(cls, k: int, ctx: GroupContext, count: int = 1) -> "RealRep":
        """``count`` copies of lambda_k; lambda_n means two trivial dimensions."""
        if not 0 <= k <= ctx.n:
            raise IndexError(f"lambda_{k} undefined for n={ctx.n}")
        if k == ctx.n:
            return cls(ctx, 2 * count, (0,) * ctx.n)
        mult = [0] * ctx.n
        mult[k] = count
        return cls(ctx, 0, tuple(mult))

    @classmethod
    def trivial(cls, d: int, ctx: GroupContext) -> "RealRep":
        return cls(ctx, d, (0,) * ctx.n)

    @property
    def dim(self) -> int:
        return self.triv + 2 * sum(self.mult)

    def fixed_dim(self, m: int) -> int:
        """Dimension of the C_{p^m}-fixed subspace."""
        return self.triv + 2 * sum(self.mult[m:])

    def is_fixed_point_free(self) -> bool:
        return self.triv == 0

    def __add__(self, other: "RealRep") -> "RealRep":
        self._same(other)
        return RealRep(self.ctx, self.triv + other.triv, tuple(a + b for a, b in zip(self.mult, other.mult)))

    def __sub__(self, other: "RealRep") -> "RealRep":
        """Componentwise difference; only defined when ``other`` is a summand."""
        self._same(other)
        if not self.contains(other):
            raise ValueError(f"{other} is not a summand of {self}")
        return RealRep(self.ctx, self.triv - other.triv, tuple(a - b for a, b in zip(self.mult, other.mult)))

    def __rmul__(self, c: int) -> "RealRep":
        return RealRep(self.ctx, c * self.triv, tuple(c * a for a in self.mult))

    def contains(self, other: "RealRep") -> bool:
        return other.triv <= self.triv and all(b <= a for a, b in zip(self.mult, other.mult))

    def _same(self, other):
        if self.ctx != other.ctx:
            raise ValueError("representations of different groups")

    def restrict(self, h: int) -> "RealRep":
        """JO-class of the restriction to C_{p^h}: lambda_k stays lambda_k for k < h, else becomes trivial."""
        if not 0 <= h <= self.ctx.n:
            raise IndexError(f"subgroup level {h} out of range")
        sub = GroupContext(self.ctx.p, h)
        triv = self.triv + 2 * sum(self.mult[h:])
        return RealRep(sub, triv, self.mult[:h])

    def lambdas_descending(self) -> list[int]:
        """Stabilizer levels of the irreducible summands, largest first."""
        out = []
        for k in range(self.ctx.n - 1, -1, -1):
            out.extend([k] * self.mult[k])
        return out

    # -- text forms --------------------------------------------------------

    def grammar(self) -> str:
        parts = []
        if self.triv:
            parts.append(f"{self.triv}t")
        parts.extend(f"{c}l{k}" for k, c in enumerate(self.mult) if c)
        return "+".join(parts) if parts else "0"

    def pretty(self) -> str:
        """Conventional notation: ``3λ+λ1+λ2+2``."""
        parts = []
        for k, c in enumerate(self.mult):
            if c:
                name = "λ" if k == 0 else f"λ{k}"
                parts.append(name if c == 1 else f"{c}{name}")
        if self.triv:
            parts.append(str(self.triv))
        return "+".join(parts) if parts else "0"

    def __str__(self):
        return self.grammar()

    def to_dict(self) -> dict:
        return {"p": self.ctx.p, "n": self.ctx.n, "triv": self.triv, "mult": list(self.mult)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RealRep":
        return cls(GroupContext(int(d["p"]), int(d["n"])), int(d["triv"]), tuple(d["mult"]))

    @classmethod
    def from_json(cls, s: str) -> "RealRep":
        return cls.from_dict(json.loads(s))


_TERM = re.compile(r"\s*(\d*)\s*(t|l(\d+))\s*")


def parse_rep(text: str, ctx: GroupContext) -> RealRep:
    """Parse ``2t+3l0+1l1``-style input; errors report the character position."""
    s = text.strip()
    if s == "0":
        return RealRep.zero(ctx)
    if not s:
        raise RepParseError(text, 0, "empty representation")
    triv = 0
    mult = [0] * ctx.n
    pos = 0
    while True:
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise RepParseError(text, pos, "expected a term like '2t' or '3l0'")
        coeff = int(m.group(1)) if m.group(1) else 1
        if m.group(3) is None:
            triv += coeff
        else:
            k = int(m.group(3))
            if k > ctx.n:
                raise RepParseError(text, m.start(3), f"lambda index {k} exceeds n={ctx.n}")
            if k == ctx.n:
                triv += 2 * coeff
            else:
                mult[k] += coeff
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "+":
            raise RepParseError(text, pos, "expected '+'")
        pos += 1
    return RealRep(ctx, triv, tuple(mult))


def jo_reduce(r: int, ctx: GroupContext) -> RealRep:
    """JO-class of lambda(r): lambda_{v_p(r)}, or two trivial dimensions when p^n | r."""
    if r == 0:
        return RealRep.lam(ctx.n, ctx)
    return RealRep.lam(min(vp(ctx.p, r), ctx.n), ctx)


def rho(ctx: GroupContext) -> RealRep:
    """Regular representation: 1 + sum of lambda(j) for 1 <= j <= (p^n - 1)/2."""
    out = RealRep.trivial(1, ctx)
    for j in range(1, (ctx.p ** ctx.n - 1) // 2 + 1):
        out = out + jo_reduce(j, ctx)
    return out


def rho_bar(ctx: GroupContext) -> RealRep:
    return rho(ctx) - RealRep.trivial(1, ctx)


def v_recursive(j: int, ctx: GroupContext) -> RealRep:
    """V_j = lambda(1) + lambda(3) + ... + lambda(2j - 1), summed one term at a time."""
    if j < 0:
        raise ValueError("j must be non-negative")
    out = RealRep.zero(ctx)
    for m in range(1, j + 1):
        out = out + jo_reduce(2 * m - 1, ctx)
    return out


def _c(p: int, ell: int) -> int:
    return (p ** ell - 1) // 2


def v_floor(j: int, ctx: GroupContext) -> RealRep:
    """V_j from the closed floor-function formula."""
    if j < 0:
        raise ValueError("j must be non-negative")
    p, n = ctx.p, ctx.n
    c1 = _c(p, 1)
    mult = []
    for ell in range(n):
        q = p ** (ell + 1)
        mult.append(
            sum((j + q - 1 - _c(p, ell) - p ** ell * t) // q for t in range(p) if t != c1)
        )
    triv = 2 * ((j + _c(p, n)) // p ** n)
    return RealRep(ctx, triv, tuple(mult))


def v_coeffs_special(a: int, ctx: GroupContext) -> tuple[int, ...]:
    """Coefficients (k_n, ..., k_0) of V_j for j = (ap - 1)/2, a = 2b + 1 odd.

    k_{n - ell} multiplies lambda_ell; k_0 counts copies of lambda_n = 2.
    """
    if a <= 0 or a % 2 == 0:
        raise ValueError(f"a must be odd and positive, got {a}")
    if ctx.n < 1:
        raise ValueError("needs n >= 1")
    p, n = ctx.p, ctx.n
    b = (a - 1) // 2
    c1 = _c(p, 1)
    out = [(p - 1) * b + c1]
    for ell in range(1, n):
        q = p ** ell
        out.append(sum((b + q - 1 - _c(p, ell - 1) - p ** (ell - 1) * t) // q for t in range(p) if t != c1))
    out.append((b * p + c1 + _c(p, n)) // p ** n)
    return tuple(out)


def special_coeffs_bounds_ok(a: int, ctx: GroupContext) -> bool:
    """(p-1) floor(b/p^l) <= k_{n-l} <= (p-1) floor((b+p^l)/p^l) for 0 < l < n."""
    p = ctx.p
    b = (a - 1) // 2
    k = v_coeffs_special(a, ctx)
    return all(
        (p - 1) * (b // p ** ell) <= k[ell] <= (p - 1) * ((b + p ** ell) // p ** ell)
        for ell in range(1, ctx.n)
    )


def special_coeffs_rep(a: int, ctx: GroupContext) -> RealRep:
    k = v_coeffs_special(a, ctx)
    return RealRep(ctx, 2 * k[ctx.n], k[: ctx.n])


def special_form(j: int, ctx: GroupContext) -> str | None:
    """Tag for rows near rho and 2 rho: ``ρ-1``, ``ρ+1``, ``ρ+λ+1``, ``2ρ-...``, ``2ρ``."""
    N = ctx.p ** ctx.n
    if N == 1:
        return None
    if j == (N - 1) // 2:
        return "ρ-1"
    if j == (N + 1) // 2:
        return "ρ+1"
    if j == (N + 3) // 2 and j < N:
        return "ρ+" + v_recursive(1, ctx).pretty() + "+1"
    if j == N:
        return "2ρ"
    if N - 2 <= j < N:
        rest = v_recursive(N - j, ctx)
        return "2ρ-" + rest.pretty().replace("+", "-")
    return None


def rep_identities_check(ctx: GroupContext) -> list[str]:
    """Check the periodicity and symmetry identities of V_j; returns failures."""
    N = ctx.p ** ctx.n
    r = rho(ctx)
    one = RealRep.trivial(1, ctx)
    two_rho = 2 * r
    bad = []
    V = [v_recursive(j, ctx) for j in range(2 * N + 1)]
    if V[N] != two_rho:
        bad.append(f"V_{N} = {V[N]} != 2rho = {two_rho}")
    if V[(N - 1) // 2] + one != r:
        bad.append("V_(p^n-1)/2 != rho - 1")
    if V[(N + 1) // 2] != r + one:
        bad.append("V_(p^n+1)/2 != rho + 1")
    for j in range(1, N):
        if V[j + N] != two_rho + V[j]:
            bad.append(f"V_{j + N} != 2rho + V_{j}")
        if not two_rho.contains(V[j]) or V[N - j] != two_rho - V[j]:
            bad.append(f"V_{N - j} != 2rho - V_{j}")
    return bad
