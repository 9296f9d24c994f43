"""
A slice spectral sequence chart for C_27
========================================

The slices of S^{infinity lambda} smash HZ are suspensions of HB_k by the
representations V_j, so each E2 column is a Bredon homology computation. We
draw the chart for t up to 26 as text, then write the full range as SVG and
JSON next to this script.
"""

import pathlib

from slicecalc.mackey import GroupContext
from slicecalc.slices import e2_page, legend, render, slice_of_L

ctx = GroupContext(3, 3)

# only even t with 3 | t + 1 carry a slice
for t in range(0, 16):
    d = slice_of_L(t, ctx)
    if not d.contractible:
        print(t, d)

print(render(e2_page("inf-lambda", (-1, 26), ctx), "text"))
for name, glyph, meaning in legend():
    print(f"{glyph}  {name:8s} {meaning}")

# the finite tower for S^{8 lambda} agrees below t = 16 and stops with constant Z
finite = e2_page("m-lambda:8", (-1, 20), ctx)
print([(c.s, c.functor) for c in finite.column(16)])

# an annotation overlay marks an extension with a dashed arrow
full = e2_page("inf-lambda", (-2, 54), ctx, annotations=[{"from": [8, 8], "to": [6, 8], "kind": "extension"}])
out = pathlib.Path(__file__).with_name("c27_chart")
out.with_suffix(".svg").write_text(render(full, "svg"), encoding="utf-8")
out.with_suffix(".json").write_text(render(full, "json"), encoding="utf-8")
print("wrote", out.with_suffix(".svg"))
