"""Small dense matrix helpers over exact fields and rings.

Matrices are tuples of row tuples.  Field routines work for any element
type with exact ``+ - * /`` and truthiness meaning "nonzero" (Fraction,
RatFunc).  Ring routines only need ``+ - *``.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations

from .errors import SingularMatrix


def mat(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def zeros(n: int, m: int | None = None, zero=Fraction(0)) -> tuple:
    m = n if m is None else m
    return tuple((zero,) * m for _ in range(n))


def identity(n: int, zero=Fraction(0), one=Fraction(1)) -> tuple:
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def shape(a) -> tuple[int, int]:
    return len(a), (len(a[0]) if a else 0)


def is_square(a) -> bool:
    return all(len(r) == len(a) for r in a)


def map_entries(f, a) -> tuple:
    return tuple(tuple(f(v) for v in r) for r in a)


def transpose(a) -> tuple:
    return tuple(zip(*a)) if a else ()


def add(a, b) -> tuple:
    return tuple(tuple(u + v for u, v in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a, b) -> tuple:
    return tuple(tuple(u - v for u, v in zip(ra, rb)) for ra, rb in zip(a, b))


def neg(a) -> tuple:
    return tuple(tuple(-v for v in r) for r in a)


def scale(s, a) -> tuple:
    return tuple(tuple(s * v for v in r) for r in a)


def matmul(a, b) -> tuple:
    bt = transpose(b)
    out = []
    for r in a:
        row = []
        for c in bt:
            acc = None
            for u, v in zip(r, c):
                t = u * v
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def matvec(a, v) -> tuple:
    return tuple(col[0] for col in matmul(a, tuple((x,) for x in v)))


def kron(a, b) -> tuple:
    """Kronecker product with row-major index ordering (i, k) -> i*len(b) + k."""
    return tuple(
        tuple(a[i][j] * b[k][l] for j in range(len(a[0])) for l in range(len(b[0])))
        for i in range(len(a))
        for k in range(len(b))
    )


def block_diag(a, b, zero=Fraction(0)) -> tuple:
    n, m = len(a), len(b)
    rows = [tuple(a[i]) + (zero,) * m for i in range(n)]
    rows += [(zero,) * n + tuple(b[i]) for i in range(m)]
    return tuple(rows)


def is_diagonal(a) -> bool:
    return all(not a[i][j] for i in range(len(a)) for j in range(len(a)) if i != j)


def is_upper_triangular(a) -> bool:
    return all(not a[i][j] for i in range(len(a)) for j in range(i))


def is_lower_triangular(a) -> bool:
    return is_upper_triangular(transpose(a))


def diagonal(a) -> tuple:
    return tuple(a[i][i] for i in range(len(a)))


def diag(entries, zero=Fraction(0)) -> tuple:
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else zero for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# field algorithms


def rref(rows):
    """Reduced row echelon form. Returns (rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv if v else v for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [u - f * v if v else u for u, v in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int | None = None, zero=Fraction(0), one=Fraction(1)) -> list[tuple]:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if ncols is None:
        ncols = len(rows[0])
    red, piv = rref(rows) if rows else ((), ())
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, p in zip(red, piv):
            if row[f]:
                v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def det(a):
    """Determinant by fraction-aware Gaussian elimination."""
    m = [list(r) for r in a]
    n = len(m)
    if n == 0:
        return Fraction(1)
    sign = 1
    acc = None
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return m[0][0] - m[0][0]
        if p != c:
            m[c], m[p] = m[p], m[c]
            sign = -sign
        piv = m[c][c]
        acc = piv if acc is None else acc * piv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / piv
                m[i] = [u - f * v for u, v in zip(m[i], m[c])]
    return acc if sign > 0 else -acc


def inverse(a, zero=Fraction(0), one=Fraction(1)) -> tuple:
    n = len(a)
    aug = [tuple(a[i]) + tuple(one if i == j else zero for j in range(n)) for i in range(n)]
    red, piv = rref(aug)
    if tuple(piv[:n]) != tuple(range(n)) or len(piv) < n:
        raise SingularMatrix("matrix is singular")
    return tuple(tuple(r[n:]) for r in red)


def det_ring(a):
    """Determinant over a commutative ring by Laplace expansion with memoised minors."""
    n = len(a)
    memo = {}

    def minor(row: int, cols: tuple):
        if row == n:
            return None
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        for k, c in enumerate(cols):
            v = a[row][c]
            if not v:
                continue
            rest = minor(row + 1, cols[:k] + cols[k + 1:])
            if rest is not None and not rest:
                continue
            t = v if rest is None else v * rest
            t = t if k % 2 == 0 else -t
            acc = t if acc is None else acc + t
        memo[key] = acc if acc is not None else a[0][0] - a[0][0]
        return memo[key]

    if n == 0:
        return Fraction(1)
    return minor(0, tuple(range(n)))


def permutations_sign(n):
    """All permutations of range(n) with their signs (brute-force oracle helper)."""
    out = []
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        out.append((p, -1 if inv % 2 else 1))
    return out
