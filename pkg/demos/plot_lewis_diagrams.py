"""
Mackey functors for cyclic p-groups
===================================

A Mackey functor for C_{p^n} assigns an abelian group to each orbit G/C_{p^m}
with restriction and transfer maps between neighbours. We build a few named
ones for C_9, print their Lewis diagrams, and recover one of them as the
cokernel of 1 - gamma on an induced functor.
"""

from slicecalc.mackey import (
    GroupContext,
    MackeyMorphism,
    check_axioms,
    ind_res,
    ind_res_shift,
    lewis_diagram,
    mackey_cokernel,
    mackey_iso,
    mackey_kernel,
    make_B,
    make_B_star,
    make_Z,
)

ctx = GroupContext(3, 2)

# B(1,0) and its dual differ only in which of res/tr is multiplication by p
for M in (make_Z(2, 2, ctx), make_B(1, 0, ctx), make_B_star(1, 0, ctx), make_Z(2, 1, ctx)):
    assert check_axioms(M) == []
    print(lewis_diagram(M))
    print()

# Ind Res from C_3 of the constant functor, with the generator acting on cosets
Z = make_Z(2, 2, ctx)
P = ind_res(1, Z)
f = MackeyMorphism.identity(P) - ind_res_shift(1, Z, P)
K, _ = mackey_kernel(f)
C, _ = mackey_cokernel(f)
print("kernel is constant Z:", bool(mackey_iso(K, Z)))
print("cokernel is Z(2,1):", bool(mackey_iso(C, make_Z(2, 1, ctx))))
print(lewis_diagram(C))
