"""Differential matrix algebras (M_n(F), D) with D(X) = X' + XP - PX.

Every derivation on M_n(F) extending d/dx differs from the entrywise one
by an inner derivation, so the matrix P is a complete parameter.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg
from .diffmod import (
    DiffModule,
    FundamentalMatrix,
    derive_matrix,
    dual,
    ratmatrix,
    rat_identity,
    render_matrix,
    tensor,
    tower_inverse,
)
from .errors import SizeLimit, UnsupportedClass
from .hyperexp import TOWER_ZERO, TowerElem, tower_matrix
from .hypersolve import (
    BASE_FIELD,
    SplittingTower,
    fundamental_over,
    horizontal_solutions,
    q_combination,
    solve_rank1,
)
from .ratfield import ONE, ZERO, RatFunc

DEFAULT_SIZE_LIMIT = 16


@dataclass(frozen=True)
class Dcsa:
    P: tuple

    def __post_init__(self):
        p = ratmatrix(self.P)
        if not p or not linalg.is_square(p):
            raise ValueError("P must be a nonempty square matrix")
        object.__setattr__(self, "P", p)

    @property
    def n(self) -> int:
        return len(self.P)

    @classmethod
    def from_json(cls, data) -> "Dcsa":
        if isinstance(data, str):
            data = json.loads(data)
        if isinstance(data, dict):
            alg = cls(data["P"])
            if "n" in data and data["n"] != alg.n:
                raise ValueError(f"n = {data['n']} does not match P of size {alg.n}")
            return alg
        return cls(data)

    def to_json(self) -> dict:
        return {"n": self.n, "P": render_matrix(self.P)}

    def column_module(self) -> DiffModule:
        """The module of Y' = PY."""
        return DiffModule(self.P)

    def is_diagonal(self) -> bool:
        return linalg.is_diagonal(self.P)

    def is_triangular(self) -> bool:
        return linalg.is_upper_triangular(self.P) or linalg.is_lower_triangular(self.P)


def elementary(n: int, k: int, l: int, zero=ZERO, one=ONE) -> tuple:
    return tuple(tuple(one if (i, j) == (k, l) else zero for j in range(n)) for i in range(n))


def apply_derivation(alg: Dcsa, x) -> tuple:
    """X' + XP - PX; RatFunc matrices stay RatFunc, anything else becomes TowerElem."""
    if all(isinstance(v, (RatFunc, int, Fraction, str)) for r in x for v in r):
        x = ratmatrix(x)
        p = alg.P
        dx = derive_matrix(x)
    else:
        x = tower_matrix(x)
        p = linalg.map_entries(TowerElem, alg.P)
        dx = linalg.map_entries(lambda v: v.derivative(), x)
    return linalg.add(dx, linalg.sub(linalg.matmul(x, p), linalg.matmul(p, x)))


def inner_action(alg: Dcsa, x) -> tuple:
    """XP - PX, the part of D that is F-linear."""
    x = ratmatrix(x)
    return linalg.sub(linalg.matmul(x, alg.P), linalg.matmul(alg.P, x))


def flatten(x) -> tuple:
    return tuple(v for r in x for v in r)


def unflatten(v, n: int) -> tuple:
    return tuple(tuple(v[i * n:(i + 1) * n]) for i in range(n))


def associated_module(alg: Dcsa) -> DiffModule:
    """n^2-dimensional module on E_11, E_12, ..., E_nn (row-major)."""
    n = alg.n
    actions = [flatten(inner_action(alg, elementary(n, k, l))) for k in range(n) for l in range(n)]
    return DiffModule.from_basis_action(actions)


def column_tensor_dual(alg: Dcsa) -> DiffModule:
    """V (x) V^dual for V the column module; equals the associated module in row-major order."""
    v = alg.column_module()
    return tensor(v, dual(v))


def require_restricted(alg: Dcsa) -> None:
    if not alg.is_triangular():
        raise UnsupportedClass("P must be diagonal or triangular")


def splitting_tower(alg: Dcsa) -> SplittingTower:
    """Tower generated by the rank-one solutions of the diagonal of P.

    For triangular P every fundamental matrix in the hyperexponential class
    has its entries in this tower.
    """
    require_restricted(alg)
    return SplittingTower(tuple(solve_rank1(alg.P[i][i]) for i in range(alg.n)))


def module_tower(alg: Dcsa) -> SplittingTower:
    """Tower generated by rank-one solutions of the associated module's diagonal."""
    require_restricted(alg)
    conn = associated_module(alg).conn
    return SplittingTower(tuple(solve_rank1(conn[i][i]) for i in range(len(conn))))


# ---------------------------------------------------------------------------
# splitting certificates


@dataclass(frozen=True)
class SplitCertificate:
    passed: bool
    residual: tuple
    determinant: TowerElem
    projective: bool = False
    scalar: TowerElem | None = None

    def __bool__(self):
        return self.passed

    def failures(self) -> list:
        return [(i, j) for i, r in enumerate(self.residual) for j, v in enumerate(r) if v]

    def to_json(self) -> dict:
        out = {
            "passed": self.passed,
            "mode": "projective" if self.projective else "strict",
            "determinant": self.determinant.render(),
            "residual": render_matrix(self.residual),
        }
        if self.projective:
            out["scalar"] = self.scalar.render() if self.scalar is not None else None
        return out


def split_check(alg: Dcsa, z, projective: bool = False) -> SplitCertificate:
    """Certify that X -> Z X Z^-1 carries (M_n(K), d/dx) onto (M_n(K), D).

    Strict mode checks Z' = PZ.  Projective mode accepts Z' = (P + s I) Z
    for a scalar s in the tower, which induces the same conjugation.
    """
    z = tower_matrix(z)
    n = alg.n
    d = linalg.det_ring(z) if len(z) == n and all(len(r) == n for r in z) else TOWER_ZERO
    if d.is_zero():
        return SplitCertificate(False, linalg.zeros(n, n, TOWER_ZERO), d, projective)
    p = linalg.map_entries(TowerElem, alg.P)
    pz = linalg.matmul(p, z)
    res = tuple(tuple(z[i][j].derivative() - pz[i][j] for j in range(n)) for i in range(n))
    if not projective:
        return SplitCertificate(all(not v for r in res for v in r), res, d)
    try:
        s = linalg.matmul(res, tower_inverse(z))
    except ValueError:
        return SplitCertificate(False, res, d, True)
    scalar = s[0][0]
    ok = all((not s[i][j]) if i != j else s[i][j] == scalar for i in range(n) for j in range(n))
    return SplitCertificate(ok, res, d, True, scalar if ok else None)


def find_split_matrix(alg: Dcsa, tower: SplittingTower = BASE_FIELD) -> FundamentalMatrix | None:
    """Some Z over the tower with Z' = PZ and det Z != 0, or None when none exists."""
    require_restricted(alg)
    return fundamental_over(alg.P, tower)


# ---------------------------------------------------------------------------
# constants


@dataclass(frozen=True)
class ConstantsAlgebra:
    ambient: Dcsa
    tower: SplittingTower
    basis: tuple  # of n x n TowerElem matrices

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def coordinates(self, x):
        """Rational coordinates of x in the basis, or None if x is not in the span."""
        return q_combination([flatten(b) for b in self.basis], flatten(tower_matrix(x)))

    @cached_property
    def structure_constants(self) -> dict:
        """(i, j) -> coordinates of basis[i] * basis[j]; raises if not closed."""
        out = {}
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                c = self.coordinates(linalg.matmul(a, b))
                if c is None:
                    raise ArithmeticError(f"product of basis elements {i}, {j} leaves the span")
                out[i, j] = c
        return out

    def is_closed(self) -> bool:
        try:
            self.structure_constants
        except ArithmeticError:
            return False
        return True

    def rank_over_base(self) -> int:
        """Rank over Q(x) of the basis: equals the dimension iff the multiplication map is injective."""
        keys = sorted(
            {(k, s) for b in self.basis for k, e in enumerate(flatten(b)) for s in e.terms},
            key=lambda t: (t[0], t[1].sort_key()),
        )
        if not keys:
            return 0
        rows = [[flatten(b)[k].coefficient(s) for k, s in keys] for b in self.basis]
        return linalg.rank(rows)

    def matrix_units(self, z) -> list:
        """Z E_ij Z^-1 expressed in the basis (a full set of matrix units when Z splits)."""
        n = self.ambient.n
        zi = tower_inverse(z)
        z = tower_matrix(z)
        out = []
        for i in range(n):
            for j in range(n):
                e = elementary(n, i, j, TOWER_ZERO, TowerElem(ONE))
                out.append(self.coordinates(linalg.matmul(linalg.matmul(z, e), zi)))
        return out

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "tower": self.tower.to_json(),
            "basis": [render_matrix(b) for b in self.basis],
        }


def constants_algebra(alg: Dcsa, tower: SplittingTower | None = None) -> ConstantsAlgebra:
    """Q-basis of {X in M_n(K) : D(X) = 0} for K the tower (default: splitting_tower)."""
    require_restricted(alg)
    if tower is None:
        tower = splitting_tower(alg)
    sols = horizontal_solutions(associated_module(alg).conn, tower)
    return ConstantsAlgebra(alg, tower, tuple(unflatten(v, alg.n) for v in sols))


@dataclass(frozen=True)
class TrivialityReport:
    trivial: bool
    dimension: int
    expected: int
    tower: SplittingTower = field(default=BASE_FIELD)

    def __bool__(self):
        return self.trivial

    def to_json(self) -> dict:
        return {
            "trivial": self.trivial,
            "horizontal_dimension": self.dimension,
            "module_dimension": self.expected,
            "tower": self.tower.to_json(),
        }


def triviality_check(alg: Dcsa, tower: SplittingTower | None = None) -> TrivialityReport:
    """Is the associated module trivial over the tower (n^2 independent horizontal elements)?"""
    ca = constants_algebra(alg, tower)
    return TrivialityReport(ca.dimension == alg.n ** 2, ca.dimension, alg.n ** 2, ca.tower)


# ---------------------------------------------------------------------------
# tensor powers


def tensor_power(alg: Dcsa, m: int, bound: int = DEFAULT_SIZE_LIMIT) -> Dcsa:
    """(M_n(F)^{(x)m}, D^{(x)m}) with P_m = sum_k I (x) ... (x) P (x) ... (x) I."""
    if m < 1:
        raise ValueError("tensor power needs m >= 1")
    size = alg.n ** m
    if size > bound:
        raise SizeLimit(f"n^m = {size} exceeds the bound {bound}")
    eye = rat_identity(alg.n)
    total = None
    for k in range(m):
        term = None
        for pos in range(m):
            f = alg.P if pos == k else eye
            term = f if term is None else linalg.kron(term, f)
        total = term if total is None else linalg.add(total, term)
    return Dcsa(total)
