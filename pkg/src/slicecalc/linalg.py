"""Exact integer linear algebra.

Smith normal form over Z, finitely generated abelian groups given by
presentations, homomorphisms between them, and subquotients (kernels,
cokernels, homology) with enough witness data to push chain maps through.

All matrices are numpy arrays with ``dtype=object`` holding Python ints, so
nothing ever overflows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "ChainComplexError",
    "NotCompatibleError",
    "imat",
    "identity",
    "zeros",
    "smith_normal_form",
    "integer_kernel",
    "solve_integer",
    "PresentedGroup",
    "GroupHom",
    "Subquotient",
    "cokernel",
    "kernel",
    "homology_at",
    "induced_hom",
]


class ChainComplexError(ValueError):
    """Raised when a pair of maps does not compose to zero."""


class NotCompatibleError(ValueError):
    """Raised when a map does not respect the subquotients it is pushed through."""


def imat(rows, shape=None) -> np.ndarray:
    """Build an object-dtype integer matrix from nested sequences."""
    a = np.array(rows, dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def identity(n: int) -> np.ndarray:
    a = np.zeros((n, n), dtype=object)
    for i in range(n):
        a[i, i] = 1
    return a


def zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=object)


def _max_abs(a: np.ndarray) -> int:
    return max(int(a.max()), -int(a.min()))


def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    if a.size * b.shape[1] < 4096:
        return a @ b
    # every partial sum is bounded by this, so machine arithmetic is exact below it
    bound = _max_abs(a) * _max_abs(b) * a.shape[1]
    if bound < 2**53:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64).astype(object)
    if bound < 2**63:
        return (a.astype(np.int64) @ b.astype(np.int64)).astype(object)
    return a @ b


# --------------------------------------------------------------------------
# Smith normal form
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _SNF:
    U: list
    Uinv: list
    V: list
    diag: tuple  # nonzero invariant factors, in divisibility order
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return len(self.diag)


def _snf_lists(A: list[list[int]], m: int, n: int) -> _SNF:
    A = [row[:] for row in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Uinv = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i != j:
            A[i], A[j] = A[j], A[i]
            U[i], U[j] = U[j], U[i]
            for row in Uinv:
                row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        if i != j:
            for row in A:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        if c:
            ra, rs = A[dst], A[src]
            for k in range(n):
                if rs[k]:
                    ra[k] += c * rs[k]
            ua, us = U[dst], U[src]
            for k in range(m):
                if us[k]:
                    ua[k] += c * us[k]
            for row in Uinv:
                if row[dst]:
                    row[src] -= c * row[dst]

    def add_col(dst, src, c):
        if c:
            for row in A:
                if row[src]:
                    row[dst] += c * row[src]
            for row in V:
                if row[src]:
                    row[dst] += c * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            r = A[i]
            for j in range(t, n):
                v = r[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            dirty = False
            piv = A[t][t]
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    if A[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/column t into the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = None
            for i in range(t + 1, m):
                r = A[i]
                for j in range(t + 1, n):
                    if r[j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for row in Uinv:
                row[t] = -row[t]
        diag.append(A[t][t])
        t += 1
    return _SNF(U, Uinv, V, tuple(diag), m, n)


def _snf(A: np.ndarray) -> _SNF:
    m, n = A.shape
    return _snf_lists([[int(x) for x in row] for row in A], m, n)


def smith_normal_form(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D``.

    U and V are unimodular, D is diagonal with nonnegative entries
    d_1 | d_2 | ... (zeros last). Pivots are chosen by minimal absolute value.
    """
    A = imat(A) if not isinstance(A, np.ndarray) else A
    s = _snf(A)
    m, n = A.shape
    D = zeros(m, n)
    for i, d in enumerate(s.diag):
        D[i, i] = d
    return imat(s.U, (m, m)), D, imat(s.V, (n, n))


def integer_kernel(A: np.ndarray) -> np.ndarray:
    """A basis (as columns) of the saturated lattice ``{x : A x = 0}``."""
    m, n = A.shape
    if m == 0:
        return identity(n)
    s = _snf(A)
    V = imat(s.V, (n, n))
    return V[:, s.rank:]


def _column_basis(P: np.ndarray) -> np.ndarray:
    """A basis for the lattice spanned by the columns of ``P``."""
    g = P.shape[0]
    if P.shape[1] == 0:
        return zeros(g, 0)
    s = _snf(P)
    Uinv = imat(s.Uinv, (g, g))
    B = Uinv[:, : s.rank].copy()
    for i, d in enumerate(s.diag):
        B[:, i] *= d
    return B


class _Solver:
    """Exact solutions of ``A x = b`` for a fixed A, reusing one SNF."""

    def __init__(self, A: np.ndarray):
        self.A = A
        self.s = _snf(A)
        m, n = A.shape
        self.U = imat(self.s.U, (m, m))
        self.V = imat(self.s.V, (n, n))

    def solve(self, B: np.ndarray) -> np.ndarray | None:
        m, n = self.A.shape
        k = B.shape[1]
        if m == 0:
            return zeros(n, k)
        c = _mul(self.U, B)
        r = self.s.rank
        if r < m and any(x != 0 for x in c[r:, :].flat):
            return None
        y = zeros(n, k)
        for i, d in enumerate(self.s.diag):
            for j in range(k):
                q, rem = divmod(c[i, j], d)
                if rem:
                    return None
                y[i, j] = q
        return _mul(self.V, y)


def solve_integer(A: np.ndarray, B: np.ndarray) -> np.ndarray | None:
    """Some integer X with ``A @ X == B``, or None if there is none."""
    return _Solver(A).solve(B)


# --------------------------------------------------------------------------
# Presented groups
# --------------------------------------------------------------------------


class PresentedGroup:
    """Z^gens modulo the column span of ``relations``.

    The canonical form is cached: ``orders`` lists the cyclic summands of the
    standard decomposition, torsion first in divisibility order, then ``0``
    for each free summand. Two presentations of isomorphic groups give the
    same ``orders``.
    """

    __slots__ = ("gens", "relations", "__dict__")

    def __init__(self, gens: int, relations=None):
        self.gens = int(gens)
        if relations is None:
            relations = zeros(self.gens, 0)
        relations = relations if isinstance(relations, np.ndarray) else imat(relations, (self.gens, -1))
        if relations.shape[0] != self.gens:
            raise ValueError("relations must have one row per generator")
        self.relations = relations

    @classmethod
    def diagonal(cls, moduli) -> "PresentedGroup":
        """Direct sum of cyclic groups Z/d, one per generator (``d = 0`` is Z)."""
        moduli = tuple(int(d) for d in moduli)
        if any(d == 1 or d < 0 for d in moduli):
            raise ValueError(f"bad cyclic moduli {moduli}")
        g = cls(len(moduli), _diag(moduli))
        g.__dict__["moduli"] = moduli
        return g

    @classmethod
    def standard(cls, orders) -> "PresentedGroup":
        """The canonical model with the given invariants (see ``orders``)."""
        g = cls.diagonal(orders)
        g.__dict__["orders"] = g.moduli
        return g

    @classmethod
    def free(cls, rank: int) -> "PresentedGroup":
        return cls.standard((0,) * rank)

    @classmethod
    def zero(cls) -> "PresentedGroup":
        return cls.standard(())

    @cached_property
    def moduli(self) -> tuple[int, ...] | None:
        return None

    @property
    def is_standard(self) -> bool:
        return self.moduli is not None

    @cached_property
    def _canonical(self):
        s = _snf(self.relations)
        orders = [d for d in s.diag] + [0] * (self.gens - s.rank)
        keep = [i for i, d in enumerate(orders) if d != 1]
        U = imat(s.U, (self.gens, self.gens))
        Uinv = imat(s.Uinv, (self.gens, self.gens))
        return tuple(orders[i] for i in keep), U[keep, :], Uinv[:, keep]

    @cached_property
    def orders(self) -> tuple[int, ...]:
        return self._canonical[0]

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.orders if d == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.orders if d)

    @property
    def invariants(self) -> tuple[int, tuple[int, ...]]:
        return self.free_rank, self.torsion

    def is_zero(self) -> bool:
        return not self.orders

    def is_cyclic(self) -> bool:
        return len(self.orders) <= 1

    def order(self) -> int | None:
        """Cardinality, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.orders:
            out *= d
        return out

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Canonical representative of each column, for standard groups."""
        if self.moduli is None:
            raise ValueError("reduce() needs a diagonal presentation")
        x = x.copy()
        for i, d in enumerate(self.moduli):
            if d:
                x[i, :] %= d
        return x

    def contains_relations(self, X: np.ndarray) -> bool:
        """True if every column of X is zero in this group."""
        if X.shape[1] == 0:
            return True
        if self.is_standard:
            return not any(x != 0 for x in self.reduce(X).flat)
        return solve_integer(self.relations, X) is not None

    def is_isomorphic(self, other: "PresentedGroup") -> bool:
        return self.orders == other.orders

    def name(self) -> str:
        return group_name(self.orders)

    def __repr__(self):
        return f"PresentedGroup({self.name()})"


def group_name(orders) -> str:
    if not orders:
        return "0"
    parts = []
    for d in orders:
        parts.append("Z" if d == 0 else f"Z/{d}")
    # collapse repeats: Z+Z+Z -> Z^3
    out, i = [], 0
    while i < len(parts):
        j = i
        while j < len(parts) and parts[j] == parts[i]:
            j += 1
        out.append(parts[i] if j - i == 1 else f"({parts[i]})^{j - i}" if "/" in parts[i] else f"{parts[i]}^{j - i}")
        i = j
    return "+".join(out)


def _diag(orders) -> np.ndarray:
    n = len(orders)
    D = zeros(n, n)
    for i, d in enumerate(orders):
        D[i, i] = d
    return D


@dataclass(frozen=True, eq=False)
class GroupHom:
    """A homomorphism given by its matrix on the chosen generators."""

    source: PresentedGroup
    target: PresentedGroup
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.target.gens, self.source.gens):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"{self.target.gens}x{self.source.gens}"
            )

    def is_well_defined(self) -> bool:
        return self.target.contains_relations(_mul(self.matrix, self.source.relations))

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        return GroupHom(other.source, self.target, _mul(self.matrix, other.matrix))

    def is_zero(self) -> bool:
        return self.target.contains_relations(self.matrix)

    @classmethod
    def zero(cls, source, target) -> "GroupHom":
        return cls(source, target, zeros(target.gens, source.gens))

    @classmethod
    def identity(cls, group) -> "GroupHom":
        return cls(group, group, identity(group.gens))


# --------------------------------------------------------------------------
# Subquotients
# --------------------------------------------------------------------------


@dataclass(eq=False)
class Subquotient:
    """``cycles / boundaries`` inside an ambient presented group.

    ``cycles`` is a lattice basis (columns) of the full preimage in Z^gens of
    the cycle subgroup, so it always contains the ambient relations.
    ``relations`` expresses ambient relations and boundaries in that basis.
    ``to_std`` / ``from_std`` translate between cycle coordinates and the
    standard generators of ``group``.
    """

    ambient: PresentedGroup
    cycles: np.ndarray
    relations: np.ndarray
    group: PresentedGroup = field(init=False)
    to_std: np.ndarray = field(init=False)
    from_std: np.ndarray = field(init=False)

    def __post_init__(self):
        l = self.cycles.shape[1]
        q = PresentedGroup(l, self.relations)
        self.group = PresentedGroup.standard(q.orders)
        _, self.to_std, self.from_std = q._canonical

    @cached_property
    def _solver(self) -> _Solver:
        return _Solver(self.cycles)

    def lifts(self) -> np.ndarray:
        """Ambient representatives of the standard generators (columns)."""
        return _mul(self.cycles, self.from_std)

    def coords(self, X: np.ndarray) -> np.ndarray:
        """Standard coordinates of ambient cycle vectors (columns)."""
        Z = self._solver.solve(X)
        if Z is None:
            raise NotCompatibleError("vector does not lie in the cycle lattice")
        return self.group.reduce(_mul(self.to_std, Z))

    def inclusion(self) -> GroupHom:
        return GroupHom(self.group, self.ambient, self.lifts())

    def projection(self) -> GroupHom:
        """Only meaningful when every ambient element is a cycle."""
        return GroupHom(self.ambient, self.group, self.coords(identity(self.ambient.gens)))


def homology_at(d_in: GroupHom, d_out: GroupHom) -> tuple[PresentedGroup, Subquotient]:
    """``ker(d_out) / im(d_in)`` as a standard group plus witnesses."""
    B = d_out.source
    if d_in.target.gens != B.gens:
        raise ValueError("d_in and d_out do not share a middle group")
    C = d_out.target
    comp = _mul(d_out.matrix, d_in.matrix)
    if not C.contains_relations(comp):
        raise ChainComplexError("d_out o d_in is not zero")
    g = B.gens
    if C.gens:
        ker = integer_kernel(np.concatenate([d_out.matrix, C.relations], axis=1))
        K = _column_basis(ker[:g, :])
    else:
        K = identity(g)
    rels = np.concatenate([B.relations, d_in.matrix], axis=1)
    if K.shape[1] == 0:
        Z = zeros(0, rels.shape[1])
    else:
        Z = _Solver(K).solve(rels)
        if Z is None:  # pragma: no cover - guaranteed by the composition check
            raise ChainComplexError("boundaries are not cycles")
    sq = Subquotient(B, K, Z)
    return sq.group, sq


def kernel(f: GroupHom) -> tuple[PresentedGroup, Subquotient]:
    zero_in = GroupHom(PresentedGroup.zero(), f.source, zeros(f.source.gens, 0))
    return homology_at(zero_in, f)


def cokernel(f: GroupHom) -> tuple[PresentedGroup, GroupHom]:
    """``target / image(f)`` with its projection map."""
    grp, sq = cokernel_witness(f)
    return grp, sq.projection()


def cokernel_witness(f: GroupHom) -> tuple[PresentedGroup, Subquotient]:
    zero_out = GroupHom(f.target, PresentedGroup.zero(), zeros(0, f.target.gens))
    return homology_at(f, zero_out)


def induced_hom(f: np.ndarray | GroupHom, src: Subquotient, tgt: Subquotient) -> GroupHom:
    """The map ``src.group -> tgt.group`` induced by an ambient map ``f``."""
    F = f.matrix if isinstance(f, GroupHom) else f
    if F.shape != (tgt.ambient.gens, src.ambient.gens):
        raise ValueError("chain map has the wrong shape")
    try:
        M = tgt.coords(_mul(F, src.lifts()))
        # boundaries and ambient relations must land on zero
        junk = tgt.coords(_mul(F, _mul(src.cycles, src.relations)))
    except NotCompatibleError as e:
        raise NotCompatibleError("map does not send cycles to cycles") from e
    if any(x != 0 for x in junk.flat):
        raise NotCompatibleError("map does not send boundaries to boundaries")
    return GroupHom(src.group, tgt.group, M)
