"""Independent oracles shared by the test modules."""

from fractions import Fraction
from math import gcd


def det(rows) -> int:
    """Exact determinant by fraction-free Gaussian elimination over Q."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            for k in range(c, n):
                a[r][k] -= f * a[c][k]
    return int(sign * out)


def rank(rows) -> int:
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def minors_gcd(rows, k: int) -> int:
    """gcd of all k x k minors; the product d_1 ... d_k of the invariant factors."""
    from itertools import combinations

    m, n = len(rows), len(rows[0]) if rows else 0
    g = 0
    for ri in combinations(range(m), k):
        for ci in combinations(range(n), k):
            g = gcd(g, det([[rows[i][j] for j in ci] for i in ri]))
    return g
