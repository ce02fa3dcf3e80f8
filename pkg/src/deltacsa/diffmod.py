"""Differential modules over Q(x) given by connection matrices.

Convention: a module with basis e_1..e_n and connection matrix A acts by
``delta_M(e_i) = -sum_j A[j][i] e_j``.  In coordinates a vector v maps to
``v' - A v``, so horizontal vectors are the solutions of ``Y' = A Y``.

Gauge transport.  With ``a = m^-1 b m - m^-1 m'`` a fundamental matrix Z of
``Y' = bY`` is carried to ``m^-1 Z`` for ``Y' = aY`` (differentiate
``m^-1 Z`` directly).  ``m Z`` is *not* a solution in general: for b = 0,
m = diag(x, 1), Z = I it gives x' = 1 but a*x = -1.  See
:func:`transport_fundamental`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .errors import SingularGauge, SingularMatrix
from .hyperexp import TOWER_ZERO, TowerElem, tower_matrix
from .ratfield import ONE, ZERO, RatFunc, derive, render


def ratmatrix(rows) -> tuple:
    """Coerce nested sequences (strings, numbers, RatFunc) to a RatFunc matrix."""
    return tuple(tuple(RatFunc.coerce(v) for v in r) for r in rows)


def rat_identity(n: int) -> tuple:
    return linalg.identity(n, ZERO, ONE)


def rat_zeros(n: int, m: int | None = None) -> tuple:
    return linalg.zeros(n, m, ZERO)


def derive_matrix(m) -> tuple:
    return linalg.map_entries(derive, m)


def render_matrix(m) -> list:
    return [[v.render() if isinstance(v, TowerElem) else render(v) for v in r] for r in m]


@dataclass(frozen=True)
class DiffModule:
    conn: tuple

    def __post_init__(self):
        conn = ratmatrix(self.conn)
        if not conn or not linalg.is_square(conn):
            raise ValueError("connection matrix must be square and nonempty")
        object.__setattr__(self, "conn", conn)

    @property
    def dim(self) -> int:
        return len(self.conn)

    @classmethod
    def from_json(cls, text: str) -> "DiffModule":
        return cls(json.loads(text))

    def to_json(self) -> list:
        return render_matrix(self.conn)

    def basis_action(self, i: int) -> tuple:
        """Coordinates of delta_M(e_i) in the basis e_1..e_n."""
        return tuple(-self.conn[j][i] for j in range(self.dim))

    @classmethod
    def from_basis_action(cls, actions) -> "DiffModule":
        """Inverse of :meth:`basis_action`: actions[i] = coordinates of delta(e_i)."""
        n = len(actions)
        return cls(tuple(tuple(-RatFunc.coerce(actions[i][j]) for i in range(n)) for j in range(n)))

    def apply(self, v) -> tuple:
        """delta_M on a coordinate vector (entries RatFunc or TowerElem)."""
        av = linalg.matvec(self.conn, v)
        return tuple(_derive_any(x) - y for x, y in zip(v, av))

    def is_diagonal(self) -> bool:
        return linalg.is_diagonal(self.conn)


def _derive_any(v):
    return v.derivative() if isinstance(v, TowerElem) else derive(RatFunc.coerce(v))


def gauge_transform(b, m) -> tuple:
    """a = m^-1 b m - m^-1 m'."""
    b, m = ratmatrix(b), ratmatrix(m)
    try:
        mi = linalg.inverse(m, ZERO, ONE)
    except SingularMatrix:
        raise SingularGauge("gauge matrix is singular") from None
    return linalg.sub(linalg.matmul(linalg.matmul(mi, b), m), linalg.matmul(mi, derive_matrix(m)))


def transport_fundamental(z, m) -> tuple:
    """Carry a fundamental matrix of b to one of gauge_transform(b, m): returns m^-1 Z."""
    mi = linalg.inverse(ratmatrix(m), ZERO, ONE)
    z = tower_matrix(z)
    return linalg.matmul(linalg.map_entries(TowerElem, mi), z)


# ---------------------------------------------------------------------------
# fundamental matrices


@dataclass(frozen=True)
class EntryResidual:
    row: int
    col: int
    residual: TowerElem

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


@dataclass(frozen=True)
class FundamentalReport:
    entries: tuple
    determinant: TowerElem
    size_ok: bool = True

    @property
    def det_ok(self) -> bool:
        return not self.determinant.is_zero()

    @property
    def passed(self) -> bool:
        return self.size_ok and self.det_ok and all(e.ok for e in self.entries)

    def __bool__(self):
        return self.passed

    def failures(self) -> list:
        return [(e.row, e.col) for e in self.entries if not e.ok]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "determinant": self.determinant.render(),
            "determinant_nonzero": self.det_ok,
            "failures": [
                {"row": e.row + 1, "col": e.col + 1, "residual": e.residual.render()}
                for e in self.entries
                if not e.ok
            ],
        }


def tower_det(z) -> TowerElem:
    return linalg.det_ring(tower_matrix(z))


def tower_inverse(z) -> tuple:
    """Inverse of a tower matrix whose determinant is a single hyperexponential term."""
    z = tower_matrix(z)
    n = len(z)
    d = linalg.det_ring(z)
    if d.is_zero():
        raise SingularMatrix("matrix is singular")
    dinv = d.inverse()
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = tuple(
                tuple(z[r][c] for c in range(n) if c != i) for r in range(n) if r != j
            )
            cof = linalg.det_ring(minor) if minor else TowerElem(ONE)
            row.append(cof * dinv if (i + j) % 2 == 0 else -(cof * dinv))
        adj.append(tuple(row))
    return tuple(adj)


def residual_matrix(conn, z) -> tuple:
    """Z' - A Z."""
    z = tower_matrix(z)
    az = linalg.matmul(linalg.map_entries(TowerElem, conn), z)
    return tuple(
        tuple(z[i][j].derivative() - az[i][j] for j in range(len(z[0]))) for i in range(len(z))
    )


def verify_fundamental(mod: DiffModule, z) -> FundamentalReport:
    z = tower_matrix(z)
    n = mod.dim
    if len(z) != n or not all(len(r) == n for r in z):
        return FundamentalReport((), TOWER_ZERO, size_ok=False)
    res = residual_matrix(mod.conn, z)
    entries = tuple(EntryResidual(i, j, res[i][j]) for i in range(n) for j in range(n))
    return FundamentalReport(entries, linalg.det_ring(z))


@dataclass(frozen=True)
class FundamentalMatrix:
    module: DiffModule
    entries: tuple
    tower: object = field(default=None, compare=False)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def determinant(self) -> TowerElem:
        return linalg.det_ring(self.entries)

    def verify(self) -> FundamentalReport:
        return verify_fundamental(self.module, self.entries)

    def to_json(self) -> list:
        return render_matrix(self.entries)


# ---------------------------------------------------------------------------
# constructions


def dual(mod: DiffModule) -> DiffModule:
    return DiffModule(linalg.neg(linalg.transpose(mod.conn)))


def tensor(m1: DiffModule, m2: DiffModule) -> DiffModule:
    """A (x) I + I (x) B, basis e_i (x) f_k ordered row-major."""
    a = linalg.kron(m1.conn, rat_identity(m2.dim))
    b = linalg.kron(rat_identity(m1.dim), m2.conn)
    return DiffModule(linalg.add(a, b))


def direct_sum(m1: DiffModule, m2: DiffModule) -> DiffModule:
    return DiffModule(linalg.block_diag(m1.conn, m2.conn, ZERO))


def trivial_module(n: int) -> DiffModule:
    return DiffModule(rat_zeros(n))


def fraction_matrix_to_rat(m) -> tuple:
    return linalg.map_entries(lambda v: RatFunc.coerce(Fraction(v)), m)
