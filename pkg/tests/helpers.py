"""Random generators and sympy-based oracles shared by the test modules."""
from fractions import Fraction

import sympy

from deltacsa.ratfield import Poly, RatFunc, render

SX = sympy.Symbol("x")

POLE_POINTS = [Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2), Fraction(-3)]


def to_sympy(f) -> sympy.Expr:
    """Independent conversion: rebuild from coefficient lists."""
    f = RatFunc.coerce(f)
    num = sum(sympy.Rational(c.numerator, c.denominator) * SX**i for i, c in enumerate(f.num.c))
    den = sum(sympy.Rational(c.numerator, c.denominator) * SX**i for i, c in enumerate(f.den.c))
    return num / den


def sympy_equal(f, expr) -> bool:
    return sympy.cancel(to_sympy(f) - expr) == 0


def from_sympy(expr) -> RatFunc:
    num, den = sympy.fraction(sympy.cancel(sympy.together(expr)))
    pn = sympy.Poly(num, SX).all_coeffs()[::-1]
    pd = sympy.Poly(den, SX).all_coeffs()[::-1]
    conv = lambda c: Fraction(int(sympy.numer(c)), int(sympy.denom(c)))
    return RatFunc(Poly(tuple(conv(c) for c in pn)), Poly(tuple(conv(c) for c in pd)))


def rand_fraction(rng, span=5, dens=(1, 1, 1, 2, 3)) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.choice(dens))


def rand_poly(rng, deg=2, span=5) -> Poly:
    return Poly(tuple(rand_fraction(rng, span) for _ in range(rng.randint(0, deg) + 1)))


def rand_split_den(rng, max_factors=2) -> Poly:
    den = Poly((Fraction(1),))
    for _ in range(rng.randint(0, max_factors)):
        c = rng.choice(POLE_POINTS)
        den = den * Poly((-c, Fraction(1)))
    return den


def rand_ratfunc(rng, deg=2, max_factors=2, span=5) -> RatFunc:
    """Random element of Q(x) whose denominator splits over Q."""
    return RatFunc(rand_poly(rng, deg, span), rand_split_den(rng, max_factors))


def rand_nonzero_ratfunc(rng, **kw) -> RatFunc:
    while True:
        f = rand_ratfunc(rng, **kw)
        if f:
            return f


def rand_rational_matrix(rng, n, span=3):
    return tuple(tuple(Fraction(rng.randint(-span, span)) for _ in range(n)) for _ in range(n))


def rand_invertible_rational(rng, n, span=3):
    import deltacsa.linalg as la

    while True:
        m = rand_rational_matrix(rng, n, span)
        if la.det(m) != 0:
            return m


def sympy_matrix(m):
    return sympy.Matrix([[to_sympy(v) for v in r] for r in m])


def render_all(m):
    return [[render(RatFunc.coerce(v)) for v in r] for r in m]


def hyperexp_to_sympy(h) -> sympy.Expr:
    expr = sympy.Rational(h.scalar.numerator, h.scalar.denominator) * to_sympy(h.cofactor)
    for c, r in h.monomials:
        expr *= (SX - sympy.Rational(c.numerator, c.denominator)) ** sympy.Rational(r.numerator, r.denominator)
    return expr * sympy.exp(to_sympy(h.exp))


def tower_to_sympy(t) -> sympy.Expr:
    from deltacsa.hyperexp import HyperexpElem

    total = sympy.Integer(0)
    for s, f in t.terms.items():
        h = HyperexpElem.make(1, s.monomials, s.exp, ONE_RF)
        total += to_sympy(f) * hyperexp_to_sympy(h)
    return total


def sympy_logder(expr) -> sympy.Expr:
    return sympy.cancel(sympy.powsimp(sympy.expand_power_base(sympy.diff(expr, SX) / expr, force=True), force=True))


from deltacsa.ratfield import ONE as ONE_RF  # noqa: E402


def bounded_rational_search(a, b, extra_degree=4, pole_order=3):
    """Independent oracle: look for y = N/D with y' = a y + b by brute linear algebra in sympy.

    D is the product of (x - c)^pole_order over the poles of a and b; N has
    degree up to deg D + extra_degree.  Returns a sympy expression or None.
    For b = 0 a nonzero y is required.
    """
    from deltacsa.ratfield import partial_fractions

    poles = set(partial_fractions(RatFunc.coerce(a)).poles()) | set(partial_fractions(RatFunc.coerce(b)).poles())
    den = sympy.Integer(1)
    for c in poles:
        den *= (SX - sympy.Rational(c.numerator, c.denominator)) ** pole_order
    deg = sympy.degree(den, SX) + extra_degree
    cs = sympy.symbols(f"c0:{deg + 1}")
    lam = sympy.Symbol("lam")
    y = sum(c * SX**i for i, c in enumerate(cs)) / den
    expr = sympy.together(sympy.diff(y, SX) - to_sympy(a) * y - lam * to_sympy(b))
    num = sympy.Poly(sympy.numer(expr), SX)
    sol = sympy.linsolve(num.coeffs(), list(cs) + [lam])
    for point in sol:
        free = set().union(*(sympy.sympify(v).free_symbols for v in point))
        if RatFunc.coerce(b).is_zero():
            if any(v != 0 for v in point[:-1]):
                sub = {f: 1 for f in free}
                vals = [sympy.sympify(v).subs(sub) for v in point]
                if any(v != 0 for v in vals[:-1]):
                    return sympy.cancel(y.subs(dict(zip(cs, vals[:-1]))))
            return None
        lam_v = point[-1]
        if lam_v == 0 and not free:
            return None
        for trial in ({f: 1 for f in free}, {f: 0 for f in free}):
            lv = sympy.sympify(lam_v).subs(trial)
            if lv != 0:
                vals = [sympy.sympify(v).subs(trial) / lv for v in point[:-1]]
                return sympy.cancel(y.subs(dict(zip(cs, vals))))
        return None
    return None


_LD_CACHE: dict = {}


def brute_is_logderivative(g) -> bool:
    """g = f'/f for some rational f?  Reconstruct f from partial fractions and re-differentiate."""
    from deltacsa.ratfield import derive, partial_fractions

    g = RatFunc.coerce(g)
    if g in _LD_CACHE:
        return _LD_CACHE[g]
    pf = partial_fractions(g)
    ok = pf.polynomial.is_zero() and all(k == 1 and v.denominator == 1 for _, k, v in pf.terms)
    if ok:
        f = RatFunc(1)
        for c, _, v in pf.terms:
            f = f * RatFunc(Poly((-c, Fraction(1)))) ** int(v)
        ok = derive(f) / f == g
    _LD_CACHE[g] = ok
    return ok


def brute_relation_set(a, bound=8):
    """All m with |m_i| <= bound and sum m_i a_i a log-derivative of a rational function."""
    import itertools

    a = [RatFunc.coerce(v) for v in a]
    out = []
    for m in itertools.product(range(-bound, bound + 1), repeat=len(a)):
        g = RatFunc(0)
        for k, v in zip(m, a):
            if k:
                g = g + v * k
        if brute_is_logderivative(g):
            out.append(m)
    return out


def brute_descriptor(a, bound=8):
    """(torus rank, invariant factors > 1) of Z^m / span(relations in the box), via sympy's Smith form."""
    from sympy.matrices.normalforms import smith_normal_form

    rel = [r for r in brute_relation_set(a, bound) if any(r)]
    m = len(a)
    if not rel:
        return m, ()
    mat = sympy.Matrix(rel)
    rank = mat.rank()
    snf = smith_normal_form(mat, domain=sympy.ZZ)
    diag = [abs(snf[i, i]) for i in range(min(snf.shape)) if snf[i, i] != 0]
    return m - rank, tuple(int(d) for d in diag if d > 1)
