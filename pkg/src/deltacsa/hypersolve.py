"""Closed-form solving for the hyperexponential class.

* rank one: y' = a y  has the solution  prod (x - c)^res_c(a) * exp(R)
  where R integrates the non-logarithmic part of a;
* diagonal systems: one rank-one problem per diagonal entry;
* rational solutions of y' = a y + b by pole-order and degree bounds
  followed by an exact linear solve (also in a parametric form, which is
  what lets triangular systems be solved over an exponential tower);
* 2x2 upper-triangular systems, with a complete-reducibility verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

from . import galois, linalg
from .diffmod import DiffModule, FundamentalMatrix, ratmatrix
from .errors import NonSplitDenominator, NotInClass, UnsupportedClass
from .hyperexp import TOWER_ZERO, HyperexpElem, Shape, TowerElem
from .ratfield import (
    ONE,
    ONE_POLY,
    ZERO,
    Poly,
    RatFunc,
    linear_factorization,
    partial_fractions,
    poly_gcd,
    render,
)


def solve_rank1(a) -> HyperexpElem:
    """Nonzero h with h'/h = a; integration constant of the exp part is 0."""
    pf = partial_fractions(RatFunc.coerce(a))
    return HyperexpElem.make(monomials=tuple(pf.residues().items()), exp=pf.nonlog_antiderivative())


# ---------------------------------------------------------------------------
# towers


@lru_cache(maxsize=4096)
def _shape_in(logders: tuple, shape: Shape) -> bool:
    if shape.is_one():
        return True
    basis = galois.relation_lattice(list(logders) + [shape.logder()])
    g = 0
    for v in basis:
        g = gcd(g, v[-1])
    return g == 1


@dataclass(frozen=True)
class SplittingTower:
    """Q(x)(xi_1, ..., xi_m) with every xi_i hyperexponential over Q(x)."""

    generators: tuple = ()

    @classmethod
    def from_logders(cls, logders) -> "SplittingTower":
        return cls(tuple(solve_rank1(a) for a in logders))

    @classmethod
    def parse(cls, texts) -> "SplittingTower":
        from .hyperexp import parse_hyperexp

        return cls(tuple(parse_hyperexp(t) for t in texts))

    @property
    def logders(self) -> tuple:
        return tuple(g.logder() for g in self.generators)

    def contains_shape(self, shape: Shape) -> bool:
        return _shape_in(self.logders, shape)

    def contains(self, v) -> bool:
        v = TowerElem.coerce(v)
        return all(self.contains_shape(s) for s in v.terms)

    def join(self, other: "SplittingTower") -> "SplittingTower":
        return SplittingTower(self.generators + other.generators)

    def description(self) -> galois.TowerDescription:
        return galois.tower_description(list(self.logders))

    def to_json(self) -> list:
        return [g.render() for g in self.generators]


BASE_FIELD = SplittingTower()


def solve_diagonal(p) -> FundamentalMatrix:
    """Fundamental matrix diag(h_1..h_n) of Y' = PY for diagonal P."""
    p = ratmatrix(p)
    if not linalg.is_diagonal(p):
        raise NotInClass("solve_diagonal needs a diagonal matrix")
    hs = [solve_rank1(p[i][i]) for i in range(len(p))]
    z = linalg.diag([h.to_tower() for h in hs], TOWER_ZERO)
    return FundamentalMatrix(DiffModule(p), z, SplittingTower(tuple(hs)))


# ---------------------------------------------------------------------------
# rational solutions


def _poly_lcm(a: Poly, b: Poly) -> Poly:
    return (a * b // poly_gcd(a, b)).monic()


def _pole_orders(f: RatFunc) -> dict:
    if f.den.degree <= 0:
        return {}
    mult, rest = linear_factorization(f.den)
    if rest.degree > 0:
        raise NonSplitDenominator(f"denominator of {render(f)} does not split over Q")
    return mult


def _valuation_at_infinity(f: RatFunc):
    return None if f.is_zero() else f.num.degree - f.den.degree


def _denominator_bound(a: RatFunc, gs) -> Poly:
    pa = _pole_orders(a)
    pg: dict = {}
    for g in gs:
        for c, k in _pole_orders(g).items():
            pg[c] = max(pg.get(c, 0), k)
    residues = partial_fractions(a).residues() if any(k == 1 for k in pa.values()) else {}
    d = ONE_POLY
    for c in sorted(set(pa) | set(pg)):
        k, beta = pa.get(c, 0), pg.get(c, 0)
        cands = [0]
        if k == 0:
            cands.append(beta - 1)
        elif k == 1:
            cands.append(beta - 1)
            rho = -residues.get(c, Fraction(0))
            if rho.denominator == 1 and rho > 0:
                cands.append(int(rho))
        else:
            cands.append(beta - k)
        m = max(cands)
        if m:
            d = d * Poly.linear(c) ** m
    return d


def _degree_excess_bound(a: RatFunc, gs) -> int:
    """Upper bound for deg(numerator) - deg(denominator) of a solution."""
    fs = [_valuation_at_infinity(g) for g in gs if not g.is_zero()]
    f = max(fs) if fs else None
    e = _valuation_at_infinity(a)
    cands = [0]
    if e is None or e <= -2:
        if f is not None:
            cands.append(f + 1)
    elif e == -1:
        if f is not None:
            cands.append(f + 1)
        alpha = a.num.lc / a.den.lc
        if alpha.denominator == 1:
            cands.append(int(alpha))
    else:
        if f is not None:
            cands.append(f - e)
    return max(cands)


@dataclass(frozen=True)
class RationalEquation:
    """y' = a y + sum_t lambda_t g_t ; with free=False, y is forced to 0."""

    a: RatFunc
    gs: tuple
    free: bool = True


def parametric_rational_solutions(eqs, nparams: int) -> list:
    """Q-basis of all (y_1..y_E, lambda) solving every equation with y_e in Q(x).

    The lambda vector is shared by all equations.  Complete whenever every
    denominator involved splits over Q.
    """
    blocks = []
    for e, eq in enumerate(eqs):
        a = RatFunc.coerce(eq.a)
        gs = [RatFunc.coerce(g) for g in eq.gs]
        l = a.den
        for g in gs:
            l = _poly_lcm(l, g.den)
        la = (l * a.num) // a.den
        lg = [(l * g.num) // g.den for g in gs]
        if eq.free:
            d = _denominator_bound(a, gs)
            nmax = d.degree + _degree_excess_bound(a, gs)
            dd = d.derivative()
            unknown_polys = []
            for i in range(nmax + 1):
                xi = Poly((0,) * i + (1,))
                dxi = Poly((0,) * (i - 1) + (i,)) if i else Poly(())
                unknown_polys.append(l * (dxi * d - xi * dd) - la * xi * d)
            param_polys = [-(g * d * d) for g in lg]
        else:
            d, nmax, unknown_polys = ONE_POLY, -1, []
            param_polys = list(lg)
        blocks.append((d, nmax, unknown_polys, param_polys))
    # column layout: unknowns of each free equation, then the shared parameters
    offsets = []
    col = 0
    for d, nmax, unknowns, _ in blocks:
        offsets.append(col)
        col += len(unknowns)
    pcol = col
    ncols = col + nparams
    rows = []
    for (d, nmax, unknowns, params), off in zip(blocks, offsets):
        polys = [(off + i, p) for i, p in enumerate(unknowns)] + [(pcol + t, p) for t, p in enumerate(params)]
        height = max((p.degree for _, p in polys), default=-1)
        for k in range(height + 1):
            row = [Fraction(0)] * ncols
            for c, p in polys:
                row[c] = p.coeff(k)
            if any(row):
                rows.append(row)
    basis = linalg.nullspace(rows, ncols) if rows else [
        tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)
    ]
    out = []
    for v in basis:
        ys = []
        for (d, nmax, unknowns, _), off in zip(blocks, offsets):
            if not unknowns:
                ys.append(ZERO)
                continue
            ys.append(RatFunc(Poly(v[off:off + len(unknowns)]), d))
        out.append((tuple(ys), tuple(v[pcol:])))
    return out


def rational_solution(a, b):
    """Some y in Q(x) with y' = a y + b, or None.

    For b = 0 the trivial solution is not reported: a nonzero y is returned
    when one exists.
    """
    a, b = RatFunc.coerce(a), RatFunc.coerce(b)
    if b.is_zero():
        kernel = rational_kernel_solutions(a)
        return kernel[0] if kernel else None
    for ys, lam in parametric_rational_solutions([RationalEquation(a, (b,))], 1):
        if lam[0]:
            return ys[0] / lam[0]
    return None


def rational_kernel_solutions(a) -> list:
    """Q-basis of rational solutions of y' = a y (dimension 0 or 1)."""
    return [ys[0] for ys, _ in parametric_rational_solutions([RationalEquation(RatFunc.coerce(a), ())], 0)]


# ---------------------------------------------------------------------------
# solving over a tower


def solve_in_tower(a, gs, tower: SplittingTower) -> list:
    """Q-basis of (y, lambda) with y' = a y + sum lambda_t g_t and y in the tower.

    Splits y along shapes: the component on a shape s with s'/s = sigma
    satisfies f' = (a - sigma) f + sum lambda_t g_{t,s}.  Shapes outside the
    tower must carry no component.
    """
    a = RatFunc.coerce(a)
    gs = [TowerElem.coerce(g) for g in gs]
    shapes = {s for g in gs for s in g.terms}
    home = solve_rank1(a).shape()
    if tower.contains_shape(home):
        shapes.add(home)
    shapes = sorted(shapes, key=Shape.sort_key)
    eqs = [
        RationalEquation(a - s.logder(), tuple(g.coefficient(s) for g in gs), tower.contains_shape(s))
        for s in shapes
    ]
    out = []
    for ys, lam in parametric_rational_solutions(eqs, len(gs)):
        y = TowerElem({s: f for s, f in zip(shapes, ys) if not f.is_zero()})
        out.append((y, lam))
    return out


def _triangular_order(conn) -> list:
    n = len(conn)
    deps = {k: {j for j in range(n) if j != k and conn[k][j]} for k in range(n)}
    order, done = [], set()
    while len(order) < n:
        ready = [k for k in range(n) if k not in done and deps[k] <= done]
        if not ready:
            raise UnsupportedClass("system is not triangular under any coordinate ordering")
        order.append(ready[0])
        done.add(ready[0])
    return order


def horizontal_solutions(conn, tower: SplittingTower = BASE_FIELD) -> list:
    """Q-basis of {Y in K^N : Y' = conn Y} for K the tower.

    Needs conn triangular after reordering coordinates; each coordinate is
    then one parametric rank-one problem over the tower.
    """
    conn = ratmatrix(conn)
    order = _triangular_order(conn)
    basis: list = []
    done: list = []
    for k in order:
        gs = []
        for vec in basis:
            acc = TOWER_ZERO
            for j, v in vec.items():
                if conn[k][j]:
                    acc = acc + v * conn[k][j]
            gs.append(acc)
        new = []
        for y, lam in solve_in_tower(conn[k][k], gs, tower):
            vec = {}
            for j in done:
                acc = TOWER_ZERO
                for t, l in enumerate(lam):
                    if l:
                        acc = acc + basis[t][j] * l
                vec[j] = acc
            vec[k] = y
            new.append(vec)
        basis = new
        done.append(k)
    n = len(conn)
    sols = [tuple(vec[i] for i in range(n)) for vec in basis]
    sols.sort(key=lambda v: next((i for i, e in enumerate(v) if e), n))
    return sols


def q_equations(vectors) -> list:
    """Q-linear equations on c with sum c_b vectors[b] = 0 (entries TowerElem)."""
    vectors = [tuple(TowerElem.coerce(e) for e in v) for v in vectors]
    if not vectors:
        return []
    keys = sorted({(i, s) for v in vectors for i, e in enumerate(v) for s in e.terms},
                  key=lambda k: (k[0], Shape.sort_key(k[1])))
    rows = []
    for i, s in keys:
        coefs = [v[i].coefficient(s) for v in vectors]
        l = ONE_POLY
        for c in coefs:
            l = _poly_lcm(l, c.den)
        polys = [c.num * (l // c.den) for c in coefs]
        for k in range(max(p.degree for p in polys) + 1):
            rows.append([p.coeff(k) for p in polys])
    return rows


def q_kernel(vectors) -> list:
    """Q-basis of linear relations among tower vectors."""
    rows = q_equations(vectors)
    n = len(vectors)
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    return linalg.nullspace(rows, n)


def q_combination(vectors, target):
    """Coefficients c in Q with sum c_b vectors[b] = target, or None."""
    for v in q_kernel(list(vectors) + [target]):
        if v[-1]:
            return tuple(-c / v[-1] for c in v[:-1])
    return None


def fundamental_over(conn, tower: SplittingTower):
    """Fundamental matrix of Y' = conn Y with entries in the tower, or None."""
    sols = horizontal_solutions(conn, tower)
    n = len(conn)
    if len(sols) < n:
        return None
    z = tuple(tuple(sols[j][i] for j in range(n)) for i in range(n))
    if linalg.det_ring(z).is_zero():
        return None
    return FundamentalMatrix(DiffModule(conn), z, tower)


# ---------------------------------------------------------------------------
# 2x2 triangular


@dataclass(frozen=True)
class TriangularSolution:
    reducible: bool
    fundamental: FundamentalMatrix | None
    gauge: tuple | None
    obstruction: str | None
    tower: SplittingTower = field(default=BASE_FIELD)

    def to_json(self) -> dict:
        from .diffmod import render_matrix

        return {
            "completely_reducible": self.reducible,
            "fundamental_matrix": self.fundamental.to_json() if self.fundamental else None,
            "gauge": render_matrix(self.gauge) if self.gauge else None,
            "obstruction": self.obstruction,
        }


def solve_triangular_2x2(p) -> TriangularSolution:
    """Upper-triangular 2x2 system: diagonalize by [[1, z], [0, 1]] when possible.

    The gauge diagonalizes P iff z' = (p11 - p22) z + p12, which is searched
    for in Q(x).
    """
    p = ratmatrix(p)
    if len(p) != 2 or p[1][0]:
        raise NotInClass("expected an upper-triangular 2x2 matrix")
    try:
        h1, h2 = solve_rank1(p[0][0]), solve_rank1(p[1][1])
    except NonSplitDenominator as e:
        raise NotInClass(str(e)) from None
    tower = SplittingTower((h1, h2))
    z = ZERO if p[0][1].is_zero() else rational_solution(p[0][0] - p[1][1], p[0][1])
    if z is None:
        return TriangularSolution(
            False,
            None,
            None,
            f"z' = ({render(p[0][0] - p[1][1])})*z + ({render(p[0][1])}) has no solution in Q(x)",
            tower,
        )
    gauge = ((ONE, z), (ZERO, ONE))
    t1, t2 = h1.to_tower(), h2.to_tower()
    zmat = ((t1, t2 * z), (TOWER_ZERO, t2))
    return TriangularSolution(True, FundamentalMatrix(DiffModule(p), zmat, tower), gauge, None, tower)
