"""Slice towers of S^{inf lambda} ^ HZ and S^{m lambda} ^ HZ, and their E2 charts.

The (ap^k - 1)-slice of L = S^{inf lambda} ^ HZ (a odd, prime to p) is
Sigma^{V_j} HB_k with j = (ap^k - 1)/2, and every other slice is
contractible. For S^{m lambda} ^ HZ the slices below 2m agree with those of
L, the 2m-slice is Sigma^{V_m} HZ, and nothing lies above.

A chart cell at (s, t) holds H_{t-s}(S^{V_j}; coefficient) for the slice in
dimension t. Charts are drawn in the coordinates
x = t - s, y = s - (p - 1)(t + 1)/p.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from html import escape

from .bredon import HomologyTable, bredon_homology, parallel_map
from .mackey import GroupContext, MackeyFunctor, make_B, make_Z
from .reps import RealRep, v_recursive, vp

__all__ = [
    "SliceDescription",
    "ChartCell",
    "Chart",
    "slice_of_L",
    "slice_tower_finite",
    "e2_page",
    "regrade",
    "differential_rescale",
    "render",
    "legend",
    "symbol_for",
    "parse_target",
]


@dataclass(frozen=True)
class SliceDescription:
    d: int
    contractible: bool
    rep: RealRep | None = None
    coefficient: str | None = None  # "B(k,0)" or "Z"

    @property
    def status(self) -> str:
        return "contractible" if self.contractible else "nontrivial"

    def functor(self, ctx: GroupContext) -> MackeyFunctor | None:
        if self.contractible:
            return None
        if self.coefficient == "Z":
            return make_Z(ctx.n, ctx.n, ctx)
        k = int(self.coefficient[2:].split(",")[0])
        return make_B(k, 0, ctx)

    def __str__(self):
        if self.contractible:
            return f"P^{self.d}_{self.d}: contractible"
        return f"P^{self.d}_{self.d} = Sigma^({self.rep.pretty()}) H{self.coefficient}"


def slice_of_L(d: int, ctx: GroupContext) -> SliceDescription:
    """The d-slice of S^{inf lambda} ^ HZ."""
    if d < 0 or d % 2 or (d + 1) % ctx.p:
        return SliceDescription(d, True)
    j = d // 2
    k = min(vp(ctx.p, d + 1), ctx.n)
    return SliceDescription(d, False, v_recursive(j, ctx), f"B({k},0)")


def slice_tower_finite(m: int, d: int, ctx: GroupContext) -> SliceDescription:
    """The d-slice of S^{m lambda} ^ HZ."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if d < 2 * m:
        return slice_of_L(d, ctx)
    if d == 2 * m:
        return SliceDescription(d, False, v_recursive(m, ctx), "Z")
    return SliceDescription(d, True)


def regrade(s: int, t: int, ctx: GroupContext) -> tuple[int, Fraction]:
    """(x, y) = (t - s, s - (p-1)(t+1)/p), exactly."""
    p = ctx.p
    return t - s, s - Fraction((p - 1) * (t + 1), p)


def differential_rescale(r: int) -> int:
    """A d_{1+2pr} in (s, t) coordinates becomes a d_{1+2r} after regrading."""
    if r <= 0:
        raise ValueError("r must be positive")
    return 1 + 2 * r


# -- symbols -------------------------------------------------------------

_BASE = {1: "•", 2: "○", 3: "◎"}
_LEGEND = [
    ("B(1,0)", "•", "filled dot"),
    ("B(1,1)", "•_", "underlined dot"),
    ("B*(1,1)", "•_*", "underlined dot, starred"),
    ("B(1,2)", "•__", "double-underlined dot"),
    ("B(2,0)", "○", "circle"),
    ("B(2,1)", "○_", "underlined circle"),
    ("B(3,0)", "◎", "double circle"),
    ("Z", "□", "box"),
]


def legend() -> list[tuple[str, str, str]]:
    """(functor, text glyph, description) for the eight standard symbols."""
    return list(_LEGEND)


def _parse_b(name: str):
    star = name.startswith("B*(")
    if not (star or name.startswith("B(")):
        return None
    inner = name[name.index("(") + 1 : -1]
    k, j = (int(x) for x in inner.split(","))
    return star, k, j


def symbol_for(name: str | None, M: MackeyFunctor | None = None) -> str:
    """Text glyph: base by order (dot, circle, double circle), one underline per step of j, * for duals."""
    if name == "Z":
        return "□"
    if name:
        b = _parse_b(name)
        if b and b[1] in _BASE:
            star, k, j = b
            return _BASE[k] + "_" * j + ("*" if star else "")
    if M is not None:
        return "[" + "|".join(g.name() for g in reversed(M.levels)) + "]"
    return f"[{name}]"


# -- charts ----------------------------------------------------------------


@dataclass(frozen=True)
class ChartCell:
    s: int
    t: int
    x: int
    y: Fraction
    symbol: str
    functor: str

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "t": self.t,
            "x": self.x,
            "yNum": self.y.numerator,
            "yDen": self.y.denominator,
            "symbol": self.symbol,
            "functor": self.functor,
        }


@dataclass
class Chart:
    ctx: GroupContext
    target: str
    cells: list[ChartCell]
    t_range: tuple[int, int] | None = None
    annotations: list[dict] = field(default_factory=list)
    columns: dict[int, SliceDescription] = field(default_factory=dict)

    def column(self, t: int) -> list[ChartCell]:
        return [c for c in self.cells if c.t == t]

    def nonzero_columns(self) -> list[int]:
        return sorted({c.t for c in self.cells})

    def key(self) -> list[tuple]:
        return sorted((c.s, c.t, c.functor) for c in self.cells)

    def to_dict(self) -> dict:
        return {
            "p": self.ctx.p,
            "n": self.ctx.n,
            "target": self.target,
            "cells": [c.to_dict() for c in self.cells],
            "annotations": self.annotations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Chart":
        ctx = GroupContext(int(d["p"]), int(d["n"]))
        cells = [
            ChartCell(c["s"], c["t"], c["x"], Fraction(c["yNum"], c["yDen"]), c["symbol"], c["functor"])
            for c in d["cells"]
        ]
        return cls(ctx, d["target"], cells, annotations=list(d.get("annotations", [])))


def parse_target(text: str) -> tuple[str, int | None]:
    """``inf-lambda`` or ``m-lambda:<m>``."""
    if text == "inf-lambda":
        return "inf-lambda", None
    if text.startswith("m-lambda:"):
        try:
            m = int(text.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad target {text!r}") from None
        if m < 0:
            raise ValueError("m must be non-negative")
        return "m-lambda", m
    raise ValueError(f"unknown target {text!r}; expected inf-lambda or m-lambda:<m>")


@lru_cache(maxsize=None)
def _column_table(ctx: GroupContext, rep: tuple, coefficient: str) -> HomologyTable:
    V = RealRep(ctx, rep[0], rep[1])
    M = make_Z(ctx.n, ctx.n, ctx) if coefficient == "Z" else make_B(int(coefficient[2:].split(",")[0]), 0, ctx)
    return bredon_homology(V, M)


def _column(ctx: GroupContext, t: int, desc: SliceDescription) -> list[ChartCell]:
    if desc.contractible:
        return []
    table = _column_table(ctx, (desc.rep.triv, desc.rep.mult), desc.coefficient)
    cells = []
    for deg in table.degrees():
        s = t - deg
        x, y = regrade(s, t, ctx)
        name = table.name(deg)
        label = name or "[" + "|".join(g.name() for g in reversed(table[deg].levels)) + "]"
        cells.append(ChartCell(s, t, x, y, symbol_for(name, table[deg]), label))
    return cells


def e2_page(target: str, t_range: tuple[int, int], ctx: GroupContext, annotations=None) -> Chart:
    """E2 cells for slice columns t0 <= t <= t1 of ``inf-lambda`` or ``m-lambda:<m>``."""
    kind, m = parse_target(target)
    t0, t1 = t_range
    ts = list(range(t0, t1 + 1))
    if kind == "inf-lambda":
        descs = [slice_of_L(t, ctx) for t in ts]
    else:
        descs = [slice_tower_finite(m, t, ctx) for t in ts]
    cols = parallel_map(lambda td: _column(ctx, td[0], td[1]), list(zip(ts, descs)))
    cells = [c for col in cols for c in col]
    return Chart(ctx, target, cells, (t0, t1), list(annotations or []), dict(zip(ts, descs)))


# -- rendering --------------------------------------------------------------


def render(chart: Chart, fmt: str = "svg") -> str:
    if fmt == "json":
        return chart.to_json() + "\n"
    if fmt == "text":
        return _render_text(chart)
    if fmt == "svg":
        return _render_svg(chart)
    raise ValueError(f"unsupported format {fmt!r}; expected svg, text or json")


def _grid(chart: Chart) -> dict[tuple[int, int], list[ChartCell]]:
    p = chart.ctx.p
    out: dict[tuple[int, int], list[ChartCell]] = {}
    for c in sorted(chart.cells, key=lambda c: (c.x, c.y, c.t, c.functor)):
        out.setdefault((c.x, int(c.y * p)), []).append(c)
    return out


def _render_text(chart: Chart) -> str:
    p = chart.ctx.p
    head = f"E2 page for {chart.target}, p={p} n={chart.ctx.n}; rows are p*y, columns are x"
    if not chart.cells:
        return head + "\n(empty)\n"
    grid = _grid(chart)
    xs = sorted({k[0] for k in grid})
    ys = sorted({k[1] for k in grid}, reverse=True)
    cells = {k: " ".join(c.symbol for c in v) for k, v in grid.items()}
    width = max(max(len(v) for v in cells.values()), max(len(str(x)) for x in xs))
    lab = max(len(str(y)) for y in ys)
    lines = [head]
    for y in ys:
        row = " ".join(cells.get((x, y), ".").center(width) for x in xs)
        lines.append(f"{y:>{lab}} | {row}")
    lines.append(" " * lab + " + " + " ".join(str(x).center(width) for x in xs))
    lines.append("legend: " + ", ".join(f"{g} {f}" for f, g, _ in _LEGEND))
    return "\n".join(lines) + "\n"


_UNIT = 24  # pixels per unit of x and per unit of p*y


def _glyph_svg(symbol: str, cx: float, cy: float) -> list[str]:
    base = symbol[0]
    under = symbol.count("_")
    star = symbol.endswith("*")
    out = []
    if base == "•":
        out.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="3" fill="black"/>')
    elif base == "○":
        out.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="4" fill="none" stroke="black"/>')
    elif base == "◎":
        out.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="4" fill="none" stroke="black"/>')
        out.append(f'<circle cx="{cx:g}" cy="{cy:g}" r="6.5" fill="none" stroke="black"/>')
    elif base == "□":
        out.append(f'<rect x="{cx - 4:g}" y="{cy - 4:g}" width="8" height="8" fill="none" stroke="black"/>')
    else:
        out.append(
            f'<text x="{cx:g}" y="{cy + 3:g}" font-size="7" text-anchor="middle">{escape(symbol)}</text>'
        )
        return out
    for i in range(under):
        yy = cy + 8 + 2.5 * i
        out.append(f'<line x1="{cx - 5:g}" y1="{yy:g}" x2="{cx + 5:g}" y2="{yy:g}" stroke="black"/>')
    if star:
        out.append(f'<text x="{cx + 6:g}" y="{cy - 3:g}" font-size="8">*</text>')
    return out


def _render_svg(chart: Chart) -> str:
    p = chart.ctx.p
    grid = _grid(chart)
    if not grid:
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="0" height="0"></svg>\n'
        )
    xs = [k[0] for k in grid]
    ys = [k[1] for k in grid]
    x0, x1 = min(min(xs), -1), max(xs)
    y0, y1 = min(min(ys), 0), max(ys)
    margin = 30
    W = (x1 - x0 + 1) * _UNIT + 2 * margin
    H = (y1 - y0 + 1) * _UNIT + 2 * margin

    def px(x):
        return margin + (x - x0) * _UNIT

    def py(yp):
        return H - margin - (yp - y0) * _UNIT

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}">',
        f"<title>E2 page for {escape(chart.target)}, p={p}, n={chart.ctx.n}</title>",
        '<g stroke="#ddd">',
    ]
    for x in range(x0, x1 + 1):
        out.append(f'<line x1="{px(x)}" y1="{py(y0)}" x2="{px(x)}" y2="{py(y1)}"/>')
    for y in range(y0, y1 + 1):
        out.append(f'<line x1="{px(x0)}" y1="{py(y)}" x2="{px(x1)}" y2="{py(y)}"/>')
    out.append("</g>")
    out.append('<g font-family="sans-serif" font-size="8" fill="#555">')
    for x in range(x0, x1 + 1):
        out.append(f'<text x="{px(x)}" y="{H - margin / 3:g}" text-anchor="middle">{x}</text>')
    out.append("</g>")
    pos = {}
    for (x, yp), cs in sorted(grid.items()):
        for i, c in enumerate(cs):
            cx = px(x) + 9 * (i - (len(cs) - 1) / 2)
            cy = py(yp)
            pos[(c.s, c.t)] = (cx, cy)
            out.extend(_glyph_svg(c.symbol, cx, cy))
    for a in chart.annotations:
        src, dst = tuple(a["from"]), tuple(a["to"])
        if src in pos and dst in pos:
            (ax, ay), (bx, by) = pos[src], pos[dst]
            dash = ' stroke-dasharray="3,2"' if a.get("kind") == "extension" else ""
            out.append(f'<line x1="{ax:g}" y1="{ay:g}" x2="{bx:g}" y2="{by:g}" stroke="black"{dash}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
