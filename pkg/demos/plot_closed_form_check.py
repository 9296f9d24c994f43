"""
Bredon homology of representation spheres
=========================================

The cellular chains of S^V with Mackey functor coefficients give the Bredon
homology exactly. For coefficients B_k there is also a closed form in terms of
the multiplicities of V; this script compares the two on a few spheres for
C_27 and reports how each degree fared.
"""

import collections

from slicecalc.bredon import bredon_homology, closed_form_index, verify_closed_form
from slicecalc.mackey import GroupContext, make_B
from slicecalc.reps import RealRep

ctx = GroupContext(3, 3)
V = RealRep(ctx, 0, (2, 1, 1))

# the cellular answer, one Lewis diagram per nonzero degree
H = bredon_homology(V, make_B(1, 0, ctx))
print(H.text())

# the indices the closed form is phrased in
idx = closed_form_index(V)
print("K =", idx.K, " support =", idx.support, " h =", idx.h)

# top degrees are flagged ambiguous rather than guessed
verdicts = collections.Counter()
for mult in [(0, 1, 1), (1, 2, 0), (2, 1, 1), (0, 0, 3)]:
    for k in (1, 2, 3):
        for r in verify_closed_form(RealRep(ctx, 0, mult), k):
            verdicts[r.verdict] += 1
            if r.verdict != "match":
                print(f"{r.rep:14s} k={k} s={r.s:2d} {r.verdict}: oracle {r.oracle}")
print(dict(verdicts))
