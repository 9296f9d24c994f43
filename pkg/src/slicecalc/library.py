"""Named coefficient functors: parsing short names and recognizing computed functors.

Names follow a small grammar: ``Z``, ``Z(k,j)``, ``B(k,j)``, ``B*(k,j)``,
``Bl(k,j,l)``, ``perm(k)`` and ``0``.
"""

from __future__ import annotations

import re
import warnings
from functools import lru_cache

from .mackey import (
    GroupContext,
    MackeyFunctor,
    make_B,
    make_B_ell,
    make_B_star,
    make_fixed_point_permutation,
    make_Z,
    mackey_iso,
    zero_functor,
)

__all__ = ["CoefficientError", "parse_coefficient", "library", "identify"]


class CoefficientError(ValueError):
    pass


_NAME = re.compile(r"^\s*(Z|B\*|Bl|B|perm|0)\s*(?:\(([^)]*)\))?\s*$")


def parse_coefficient(text: str, ctx: GroupContext) -> MackeyFunctor:
    """Build the functor named by ``text``. B indices past n are clamped with a warning."""
    m = _NAME.match(text)
    if not m:
        raise CoefficientError(f"unknown coefficient {text!r}; expected Z, Z(k,j), B(k,j), B*(k,j), Bl(k,j,l) or perm(k)")
    head, args = m.group(1), m.group(2)
    try:
        vals = [int(x) for x in args.split(",")] if args is not None and args.strip() else []
    except ValueError:
        raise CoefficientError(f"non-integer index in {text!r}") from None
    arity = {"Z": (0, 2), "B": (2,), "B*": (2,), "Bl": (3,), "perm": (1,), "0": (0,)}[head]
    if len(vals) not in arity:
        raise CoefficientError(f"{head} takes {' or '.join(map(str, arity))} indices, got {len(vals)} in {text!r}")
    n = ctx.n
    try:
        if head == "0":
            return zero_functor(ctx)
        if head == "Z":
            return make_Z(n, n, ctx) if not vals else make_Z(vals[0], vals[1], ctx)
        if head == "perm":
            return make_fixed_point_permutation(vals[0], ctx)
        if any(v > n for v in vals[:2]):
            warnings.warn(f"indices of {text!r} above n={n} are clamped to n", stacklevel=2)
        if head == "B":
            return make_B(vals[0], vals[1], ctx)
        if head == "B*":
            return make_B_star(vals[0], vals[1], ctx)
        return make_B_ell(vals[0], vals[1], vals[2], ctx)
    except IndexError as e:
        raise CoefficientError(str(e)) from None


@lru_cache(maxsize=None)
def library(ctx: GroupContext) -> tuple[MackeyFunctor, ...]:
    """Every named functor for this group, each isomorphism class once, in preference order."""
    n = ctx.n
    out = [zero_functor(ctx), make_Z(n, n, ctx)]
    for k in range(1, n + 1):
        for j in range(0, n - k + 1):
            out.append(make_B(k, j, ctx))
    for k in range(1, n + 1):
        for j in range(0, n - k):
            out.append(make_B_star(k, j, ctx))
    for k in range(1, n + 1):
        for j in range(0, n - k):
            for ell in range(1, n - k - j):
                out.append(make_B_ell(k, j, ell, ctx))
    for k in range(1, n + 1):
        for j in range(k):
            out.append(make_Z(k, j, ctx))
    for k in range(n):
        out.append(make_fixed_point_permutation(k, ctx))
    return tuple(out)


def identify(M: MackeyFunctor) -> str | None:
    """Name of the library functor isomorphic to M, if any."""
    orders = M.orders()
    for L in library(M.ctx):
        if L.orders() == orders and mackey_iso(L, M):
            return L.name
    return None
