"""Exponent lattices of exponential towers and the diagonalizable group descriptor.

For generators xi_1..xi_m with delta(xi_i)/xi_i = a_i in Q(x), the relation
lattice is L0 = {m in Z^m : prod xi_i^m_i in Q(x)}.  The group of the
tower is diagonalizable with character group Z^m / L0: its free rank is
the torus rank, its torsion gives the finite invariant factors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import lcm, prod

from . import linalg
from .ratfield import RatFunc, partial_fractions


# ---------------------------------------------------------------------------
# integer lattices


def _xgcd(a: int, b: int):
    """(g, s, t) with s*a + t*b = g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def echelon_with_transform(rows):
    """Integer row echelon form H = U * A with U unimodular.

    Returns (H, U) as lists of lists; zero rows of H come last.
    """
    a = [list(r) for r in rows]
    k = len(a)
    ncols = len(a[0]) if a else 0
    u = [[int(i == j) for j in range(k)] for i in range(k)]
    r = 0
    for c in range(ncols):
        if r == k:
            break
        for i in range(r + 1, k):
            if a[i][c] == 0:
                continue
            g, s, t = _xgcd(a[r][c], a[i][c])
            p, q = a[r][c] // g, a[i][c] // g
            a[r], a[i] = (
                [s * x + t * y for x, y in zip(a[r], a[i])],
                [-q * x + p * y for x, y in zip(a[r], a[i])],
            )
            u[r], u[i] = (
                [s * x + t * y for x, y in zip(u[r], u[i])],
                [-q * x + p * y for x, y in zip(u[r], u[i])],
            )
        if a[r][c] != 0:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                u[r] = [-x for x in u[r]]
            r += 1
    return a, u


def integer_kernel(matrix, ncols: int) -> list[list[int]]:
    """Z-basis of {v in Z^ncols : matrix . v = 0}."""
    if not matrix:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    at = [[matrix[i][j] for i in range(len(matrix))] for j in range(ncols)]
    h, u = echelon_with_transform(at)
    return [u[i] for i in range(ncols) if not any(h[i])]


def hnf_basis(vectors, dim: int) -> tuple:
    """Canonical row Hermite normal form of the lattice spanned by vectors."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return ()
    h, _ = echelon_with_transform(vecs)
    h = [row for row in h if any(row)]
    for i, row in enumerate(h):
        p = next(j for j, x in enumerate(row) if x)
        for k in range(i):
            q = h[k][p] // row[p]
            if q:
                h[k] = [x - q * y for x, y in zip(h[k], row)]
    return tuple(tuple(r) for r in h)


def lattice_contains(basis, v) -> bool:
    """Membership test against a row HNF basis."""
    v = list(v)
    for row in basis:
        p = next(j for j, x in enumerate(row) if x)
        if v[p] % row[p]:
            return False
        q = v[p] // row[p]
        v = [x - q * y for x, y in zip(v, row)]
    return not any(v)


def smith_diagonal(rows, ncols: int) -> list[int]:
    """Nonzero diagonal of the Smith normal form (each divides the next)."""
    a = [list(r) for r in rows]
    nr = len(a)
    out = []
    t = 0

    def swap_into_pivot(i, j):
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]

    while True:
        entries = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, ncols) if a[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        swap_into_pivot(i, j)
        while True:
            p = a[t][t]
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, ncols):
                q = a[t][j] // p
                if q:
                    for r in a:
                        r[j] -= q * r[t]
            rest = [(abs(a[i][t]), i, t) for i in range(t + 1, nr) if a[i][t]]
            rest += [(abs(a[t][j]), t, j) for j in range(t + 1, ncols) if a[t][j]]
            if rest:
                _, i, j = min(rest)
                swap_into_pivot(i, j)
                continue
            bad = next((i for i in range(t + 1, nr) for j in range(t + 1, ncols) if a[i][j] % p), None)
            if bad is not None:
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            break
        out.append(abs(a[t][t]))
        t += 1
    return out


# ---------------------------------------------------------------------------
# exponent data of logarithmic derivatives


@dataclass(frozen=True)
class ExponentData:
    residues: dict  # pole -> residue of the simple-pole term
    nonlog: dict  # key -> coefficient of the part that integrates to a rational function

    @property
    def has_exp_part(self) -> bool:
        return bool(self.nonlog)


def exponent_data(a) -> ExponentData:
    pf = partial_fractions(RatFunc.coerce(a))
    residues = {c: r for c, r in pf.residues().items() if r}
    nonlog = {("x", k): v for k, v in enumerate(pf.polynomial.c) if v}
    for c, k, v in pf.terms:
        if k > 1:
            nonlog[("pole", c, k)] = v
    return ExponentData(residues, nonlog)


def _integer_row(values) -> list[int]:
    d = reduce(lambda acc, v: lcm(acc, Fraction(v).denominator), values, 1)
    return [int(Fraction(v) * d) for v in values]


def relation_lattice(a) -> tuple:
    """HNF basis of L0 = {m : sum m_i a_i is the log-derivative of some f in Q(x)}.

    sum m_i a_i = f'/f for rational f exactly when its polynomial part and
    higher-order pole terms cancel and every simple-pole residue is an
    integer; both are linear conditions on m.
    """
    data = [exponent_data(v) for v in a]
    m = len(data)
    poles = sorted({c for d in data for c in d.residues})
    keys = sorted({k for d in data for k in d.nonlog}, key=repr)
    width = m + len(poles)
    rows = []
    for key in keys:
        rows.append(_integer_row([d.nonlog.get(key, 0) for d in data]) + [0] * len(poles))
    for j, c in enumerate(poles):
        vals = [d.residues.get(c, Fraction(0)) for d in data]
        den = reduce(lambda acc, v: lcm(acc, v.denominator), vals, 1)
        row = [int(v * den) for v in vals] + [0] * len(poles)
        row[m + j] = -den
        rows.append(row)
    kernel = integer_kernel(rows, width)
    return hnf_basis([v[:m] for v in kernel], m)


def is_logderivative(g) -> bool:
    """True iff g = f'/f for some nonzero f in Q(x)."""
    return relation_lattice([g]) == ((1,),)


# ---------------------------------------------------------------------------
# descriptor


@dataclass(frozen=True)
class GaloisDescriptor:
    torus_rank: int
    invariant_factors: tuple
    residue_matrix: tuple  # generators x poles
    poles: tuple
    exp_flags: tuple  # per generator: does it carry an exp(R) part
    relation_basis: tuple = field(default=())

    @property
    def generators(self) -> int:
        return len(self.exp_flags)

    @property
    def finite_order(self) -> int:
        return prod(self.invariant_factors)

    def is_finite(self) -> bool:
        return self.torus_rank == 0

    def to_json(self) -> dict:
        return {"torus_rank": self.torus_rank, "invariant_factors": list(self.invariant_factors)}

    def summary(self) -> str:
        parts = []
        if self.torus_rank:
            parts.append(f"torus of rank {self.torus_rank}")
        if self.invariant_factors:
            parts.append(" x ".join(f"Z/{d}" for d in self.invariant_factors))
        return " x ".join(parts) if parts else "trivial group"


def classify(a) -> GaloisDescriptor:
    a = [RatFunc.coerce(v) for v in a]
    m = len(a)
    basis = relation_lattice(a)
    diag_ = smith_diagonal(basis, m)
    data = [exponent_data(v) for v in a]
    poles = tuple(sorted({c for d in data for c in d.residues}))
    return GaloisDescriptor(
        torus_rank=m - len(diag_),
        invariant_factors=tuple(d for d in diag_ if d > 1),
        residue_matrix=tuple(tuple(d.residues.get(c, Fraction(0)) for c in poles) for d in data),
        poles=poles,
        exp_flags=tuple(d.has_exp_part for d in data),
        relation_basis=basis,
    )


@dataclass(frozen=True)
class TowerDescription:
    transcendence_degree: int
    algebraic_degree: int
    exponential: bool
    descriptor: GaloisDescriptor

    def to_json(self) -> dict:
        return {
            "transcendence_degree": self.transcendence_degree,
            "algebraic_degree": self.algebraic_degree,
            "exponential_extension": self.exponential,
            "group": self.descriptor.to_json(),
        }


def transcendence_degree(a) -> int:
    """Q-rank of the non-logarithmic parts: xi^m is algebraic iff that part of sum m_i a_i vanishes."""
    data = [exponent_data(v) for v in a]
    keys = sorted({k for d in data for k in d.nonlog}, key=repr)
    if not keys:
        return 0
    return linalg.rank([[d.nonlog.get(k, Fraction(0)) for d in data] for k in keys])


def tower_description(a) -> TowerDescription:
    desc = classify(a)
    trdeg = transcendence_degree(a)
    if trdeg != desc.torus_rank:
        raise AssertionError(f"transcendence degree {trdeg} != torus rank {desc.torus_rank}")
    return TowerDescription(trdeg, desc.finite_order, True, desc)
