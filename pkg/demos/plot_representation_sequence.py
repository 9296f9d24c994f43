"""
The sequence V_j for C_27
=========================

Each V_j is a 2j-dimensional real representation built from the irreducibles
lambda_i on which C_{p^i} acts trivially. Here we print the first 27 terms for
p = 3, n = 3, check two independent constructions against each other, and look
at the periodicity in 2 rho.
"""

from slicecalc.mackey import GroupContext
from slicecalc.reps import RealRep, rho, special_form, v_floor, v_recursive

ctx = GroupContext(3, 3)

# the recursive construction and the closed floor formula agree term by term
for j in range(1, 28):
    V = v_recursive(j, ctx)
    assert V == v_floor(j, ctx)
    tag = special_form(j, ctx) or ""
    print(f"{j:3d}  {V.pretty():22s} {tag}")

# adding |G| to the index adds two copies of the regular representation
two_rho = 2 * rho(ctx)
for j in (1, 5, 13):
    assert v_recursive(j + 27, ctx) == two_rho + v_recursive(j, ctx)

# restricting to a subgroup gives the same sequence for the smaller group
sub = GroupContext(3, 1)
print(v_recursive(8, ctx).restrict(1).pretty(), "=", v_recursive(8, sub).pretty())

# the fixed points shrink as the subgroup grows, down to the trivial summand
V = v_recursive(14, ctx) + RealRep.trivial(1, ctx)
print([V.fixed_dim(m) for m in range(ctx.n + 1)])
