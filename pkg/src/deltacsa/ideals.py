"""Right ideals of M_n, the column-space correspondence, and delta-right ideals.

A right ideal I of M_n(k) is determined by the subspace of all columns of
its elements: I = {X : every column of X lies in W}.  With the derivation
D(X) = X' + XP - PX, the ideal of W is D-stable exactly when W is a
submodule of the column module, i.e. w' - Pw lies in W for w in W.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import galois, linalg
from .dcsa import ConstantsAlgebra, Dcsa, apply_derivation, flatten, unflatten
from .diffmod import ratmatrix, render_matrix
from .errors import SingularMatrix, UnsupportedClass
from .hyperexp import TOWER_ZERO, TowerElem
from .hypersolve import q_kernel, rational_kernel_solutions, rational_solution, solve_triangular_2x2
from .ratfield import ONE, ZERO, RatFunc, derive, render

MAX_DIAGONAL = 4


def _unit(v):
    """(zero, one) of the coefficient field of v."""
    if isinstance(v, RatFunc):
        return ZERO, ONE
    return Fraction(0), Fraction(1)


def _field_of(vectors):
    for v in vectors:
        for e in v:
            if isinstance(e, RatFunc):
                return ZERO, ONE
    return Fraction(0), Fraction(1)


@dataclass(frozen=True)
class Subspace:
    """Subspace of k^n stored as its reduced row echelon basis."""

    n: int
    basis: tuple = ()

    @classmethod
    def span(cls, n: int, vectors) -> "Subspace":
        vectors = [tuple(v) for v in vectors if any(v)]
        if not vectors:
            return cls(n, ())
        zero, one = _field_of(vectors)
        if zero is ZERO:
            vectors = [tuple(RatFunc.coerce(e) for e in v) for v in vectors]
        red, _ = linalg.rref(vectors)
        return cls(n, red)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int, zero=Fraction(0), one=Fraction(1)) -> "Subspace":
        return cls(n, linalg.identity(n, zero, one))

    @classmethod
    def coordinate(cls, n: int, indices, zero=Fraction(0), one=Fraction(1)) -> "Subspace":
        idx = sorted(indices)
        return cls(n, tuple(tuple(one if j == i else zero for j in range(n)) for i in idx))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self):
        return hash((self.n, self.basis))

    def contains(self, v) -> bool:
        if not any(v):
            return True
        return Subspace.span(self.n, list(self.basis) + [tuple(v)]).dim == self.dim

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(v) for v in self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self <= other and self.dim < other.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.n, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        if not self.basis or not other.basis:
            return Subspace.zero(self.n)
        zero, one = _field_of(list(self.basis) + list(other.basis))
        cols = list(self.basis) + [tuple(-e for e in v) for v in other.basis]
        rows = [tuple(c[i] for c in cols) for i in range(self.n)]
        ker = linalg.nullspace(rows, len(cols), zero, one)
        vecs = []
        for k in ker:
            acc = [zero] * self.n
            for c, u in zip(k[: self.dim], self.basis):
                if c:
                    acc = [a + c * b for a, b in zip(acc, u)]
            vecs.append(tuple(acc))
        return Subspace.span(self.n, vecs)

    def image(self, c) -> "Subspace":
        return Subspace.span(self.n, [linalg.matvec(c, v) for v in self.basis])

    def annihilator(self) -> list:
        """Row vectors q with q . w = 0 for every w in the subspace."""
        zero, one = _field_of(self.basis) if self.basis else (Fraction(0), Fraction(1))
        if not self.basis:
            return list(linalg.identity(self.n, zero, one))
        return linalg.nullspace(self.basis, self.n, zero, one)

    def to_json(self) -> list:
        return [[render(RatFunc.coerce(e)) for e in v] for v in self.basis]


@dataclass(frozen=True)
class RightIdeal:
    """{X in M_n : every column of X lies in column_space}."""

    column_space: Subspace

    @property
    def n(self) -> int:
        return self.column_space.n

    @classmethod
    def generated_by(cls, n: int, matrices) -> "RightIdeal":
        cols = [tuple(m[i][j] for i in range(n)) for m in matrices for j in range(n)]
        return cls(Subspace.span(n, cols))

    @property
    def dim(self) -> int:
        return self.n * self.column_space.dim

    def matrix_basis(self) -> list:
        n = self.n
        out = []
        for w in self.column_space.basis:
            zero, _ = _unit(w[0])
            for j in range(n):
                out.append(tuple(tuple(w[i] if c == j else zero for c in range(n)) for i in range(n)))
        return out

    def contains(self, x) -> bool:
        """Membership; tower-valued X is tested in I (x) K through the annihilator of W."""
        n = self.n
        if any(isinstance(v, TowerElem) for r in x for v in r):
            ann = self.column_space.annihilator()
            return all(
                sum((x[i][j] * RatFunc.coerce(q[i]) for i in range(n)), TOWER_ZERO).is_zero()
                for q in ann
                for j in range(n)
            )
        return all(self.column_space.contains(tuple(x[i][j] for i in range(n))) for j in range(n))

    def __le__(self, other: "RightIdeal") -> bool:
        return self.column_space <= other.column_space

    def to_json(self) -> list:
        return [render_matrix(ratmatrix(m)) for m in self.matrix_basis()]


def phi(ideal: RightIdeal) -> Subspace:
    return ideal.column_space


def phi_inverse(w: Subspace) -> RightIdeal:
    return RightIdeal(w)


def matrix_span(n: int, matrices) -> Subspace:
    """Span of matrices as vectors of length n^2 (row-major); brute-force view of an ideal."""
    return Subspace.span(n * n, [flatten(m) for m in matrices])


def conjugate(ideal: RightIdeal, c) -> RightIdeal:
    """C I C^-1, computed from a matrix basis of I."""
    zero, one = _field_of(c)
    try:
        ci = linalg.inverse(c, zero, one)
    except SingularMatrix:
        raise SingularMatrix("conjugating matrix is singular") from None
    mats = [linalg.matmul(linalg.matmul(c, x), ci) for x in ideal.matrix_basis()]
    return RightIdeal.generated_by(ideal.n, mats)


# ---------------------------------------------------------------------------
# delta-stability


def module_action(p, v) -> tuple:
    """w' - P w."""
    pv = linalg.matvec(p, v)
    return tuple(derive(RatFunc.coerce(a)) - b for a, b in zip(v, pv))


def is_delta_stable(p, w: Subspace) -> bool:
    p = ratmatrix(p)
    return all(w.contains(module_action(p, v)) for v in w.basis)


def is_delta_ideal(alg: Dcsa, ideal: RightIdeal) -> bool:
    """Independent check: D maps a spanning set of the ideal into the ideal."""
    return all(ideal.contains(apply_derivation(alg, x)) for x in ideal.matrix_basis())


@dataclass(frozen=True)
class StableLattice:
    subspaces: tuple
    complete: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "note": self.note,
            "subspaces": [s.to_json() for s in self.subspaces],
        }


def _swap2():
    return ((ZERO, ONE), (ONE, ZERO))


def _cotrivial_classes(entries) -> list:
    """Group indices i ~ j when p_i - p_j is the log-derivative of a rational function."""
    classes: list = []
    for i, p in enumerate(entries):
        for cl in classes:
            if galois.is_logderivative(p - entries[cl[0]]):
                cl.append(i)
                break
        else:
            classes.append([i])
    return classes


def _all_coordinate(n: int) -> list:
    return [Subspace.coordinate(n, idx, ZERO, ONE) for k in range(n + 1) for idx in combinations(range(n), k)]


def _upper_2x2(p) -> StableLattice:
    e1 = Subspace.coordinate(2, [0], ZERO, ONE)
    subs = [Subspace.zero(2), e1]
    a = p[0][0] - p[1][1]
    z0 = rational_solution(a, p[0][1])
    complete = True
    note = ""
    if z0 is not None:
        subs.append(Subspace.span(2, [(z0, ONE)]))
        hom = rational_kernel_solutions(a)
        if hom:
            complete = False
            subs.append(Subspace.span(2, [(z0 + hom[0], ONE)]))
            note = f"every line spanned by (z, 1) with z = z0 + c*({render(hom[0])}), c in Q, is stable"
    subs.append(Subspace.full(2, ZERO, ONE))
    return StableLattice(tuple(subs), complete, note)


def delta_stable_subspaces(p) -> StableLattice:
    """Submodules of the column module Y' = PY on the restricted class.

    Complete for diagonal P (n <= 4) whose entries are pairwise
    non-cotrivial, and for 2x2 triangular P whose diagonal difference has
    no rational exponential solution.  Otherwise the family returned spans
    the lattice and ``complete`` is False.
    """
    p = ratmatrix(p)
    n = len(p)
    if linalg.is_diagonal(p):
        if n > MAX_DIAGONAL:
            raise UnsupportedClass(f"diagonal search limited to n <= {MAX_DIAGONAL}")
        classes = _cotrivial_classes(linalg.diagonal(p))
        subs = _all_coordinate(n)
        if all(len(c) == 1 for c in classes):
            return StableLattice(tuple(subs), True)
        blocks = [c for c in classes if len(c) > 1]
        note = "isotypic blocks " + ", ".join(
            "{" + ",".join(str(i + 1) for i in c) + "}" for c in blocks
        ) + ": within a block every twisted constant subspace is stable"
        return StableLattice(tuple(subs), False, note)
    if n == 2 and linalg.is_upper_triangular(p):
        return _upper_2x2(p)
    if n == 2 and linalg.is_lower_triangular(p):
        s = _swap2()
        swapped = _upper_2x2(linalg.matmul(linalg.matmul(s, p), s))
        return StableLattice(tuple(w.image(s) for w in swapped.subspaces), swapped.complete, swapped.note)
    raise UnsupportedClass("stable-subspace search needs diagonal (n <= 4) or 2x2 triangular P")


def coordinate_stable_subspaces(p) -> StableLattice:
    """Restricted search: only coordinate subspaces are tested, for any square P."""
    p = ratmatrix(p)
    subs = [w for w in _all_coordinate(len(p)) if is_delta_stable(p, w)]
    return StableLattice(tuple(subs), False, "coordinate subspaces only")


# ---------------------------------------------------------------------------
# criteria


@dataclass(frozen=True)
class ReductiveVerdict:
    reductive: bool
    ideals: tuple = ()
    witness: RightIdeal | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "reductive": self.reductive,
            "decomposition": [
                {"column_space": i.column_space.to_json(), "dimension": i.dim, "basis": i.to_json()}
                for i in self.ideals
            ],
            "witness": None if self.witness is None else {
                "column_space": self.witness.column_space.to_json(),
                "dimension": self.witness.dim,
            },
            "note": self.note,
        }


def reductive_criterion(alg: Dcsa) -> ReductiveVerdict:
    """Is A a direct sum of minimal delta-right ideals (column module completely reducible)?"""
    p = alg.P
    n = alg.n
    if linalg.is_diagonal(p):
        if n > MAX_DIAGONAL:
            raise UnsupportedClass(f"diagonal search limited to n <= {MAX_DIAGONAL}")
        ideals = tuple(phi_inverse(Subspace.coordinate(n, [i], ZERO, ONE)) for i in range(n))
        return ReductiveVerdict(True, ideals)
    if n != 2 or not alg.is_triangular():
        raise UnsupportedClass("reductive criterion needs diagonal (n <= 4) or 2x2 triangular P")
    upper = linalg.is_upper_triangular(p)
    s = _swap2()
    q = p if upper else linalg.matmul(linalg.matmul(s, p), s)
    sol = solve_triangular_2x2(q)
    fix = (lambda w: w) if upper else (lambda w: w.image(s))
    line1 = fix(Subspace.coordinate(2, [0], ZERO, ONE))
    if sol.reducible:
        z = sol.gauge[0][1]
        line2 = fix(Subspace.span(2, [(z, ONE)]))
        return ReductiveVerdict(True, (phi_inverse(line1), phi_inverse(line2)))
    return ReductiveVerdict(False, (), phi_inverse(line1), sol.obstruction or "")


@dataclass(frozen=True)
class IdealChain:
    ideals: tuple

    @property
    def dims(self) -> tuple:
        return tuple(i.dim for i in self.ideals)

    def is_strict(self) -> bool:
        return all(a <= b and a.dim < b.dim for a, b in zip(self.ideals, self.ideals[1:]))

    def to_json(self) -> dict:
        return {
            "dimensions": list(self.dims),
            "column_spaces": [i.column_space.to_json() for i in self.ideals],
        }


def _standard_flag(n: int, upper: bool) -> list:
    order = range(n) if upper else range(n - 1, -1, -1)
    order = list(order)
    return [Subspace.coordinate(n, order[: j + 1], ZERO, ONE) for j in range(n)]


def _flag_in(lattice, n: int):
    by_dim: dict = {}
    for w in lattice:
        by_dim.setdefault(w.dim, []).append(w)

    def extend(chain):
        if len(chain) == n:
            return chain
        for w in by_dim.get(len(chain) + 1, []):
            if not chain or chain[-1] <= w:
                got = extend(chain + [w])
                if got:
                    return got
        return None

    return extend([])


def flag_criterion(alg: Dcsa, lattice=None) -> IdealChain | None:
    """Chain of delta-right ideals of dimensions n, 2n, ..., n^2, or None.

    Triangular P gives the coordinate flag directly.  Otherwise the flag is
    searched inside ``lattice`` (default: :func:`delta_stable_subspaces`).
    """
    n = alg.n
    if lattice is None:
        if alg.is_triangular():
            flag = _standard_flag(n, linalg.is_upper_triangular(alg.P))
            if all(is_delta_stable(alg.P, w) for w in flag):
                return IdealChain(tuple(phi_inverse(w) for w in flag))
        lattice = delta_stable_subspaces(alg.P).subspaces
    else:
        lattice = getattr(lattice, "subspaces", lattice)
    flag = _flag_in([w for w in lattice if w.dim > 0], n)
    if flag is None:
        return None
    return IdealChain(tuple(phi_inverse(w) for w in flag))


# ---------------------------------------------------------------------------
# constants inside an ideal


def constants_in_ideal(ca: ConstantsAlgebra, ideal: RightIdeal) -> list:
    """Q-basis of the constants X (D(X) = 0 over the tower) lying in ideal (x) K."""
    n = ca.ambient.n
    ann = ideal.column_space.annihilator()
    if not ann:
        return list(ca.basis)
    q = tuple(tuple(TowerElem(RatFunc.coerce(e)) for e in row) for row in ann)
    images = [flatten(linalg.matmul(q, b)) for b in ca.basis]
    out = []
    for c in q_kernel(images):
        acc = [TOWER_ZERO] * (n * n)
        for coef, b in zip(c, ca.basis):
            if coef:
                acc = [u + v * coef for u, v in zip(acc, flatten(b))]
        out.append(unflatten(acc, n))
    return out
