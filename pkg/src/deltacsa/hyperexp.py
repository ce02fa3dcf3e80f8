"""Hyperexponential elements and exact sums of them.

A :class:`HyperexpElem` is ``scalar * cofactor * prod (x - c)^r * exp(R)``.
Normal form: every rational linear factor lives in the monomial list (with
any nonzero rational exponent), the cofactor keeps only factors without
rational roots and is monic top and bottom, and ``R`` has no constant term.

A :class:`TowerElem` is a finite Q(x)-linear combination of *shapes*.  A
:class:`Shape` is ``prod (x - c)^r * exp(R)`` with every ``r`` in (0, 1);
two hyperexponential elements have the same shape iff their quotient is
in Q(x).  Distinct shapes are linearly independent over Q(x), so a tower
element is zero iff all its coefficients are zero.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DivisionByZero, ParseError
from .ratfield import (
    ONE,
    ONE_POLY,
    ZERO,
    Poly,
    RatFunc,
    derive,
    linear_factorization,
    parse,
    render,
    render_poly,
)


def _strip_constant(r: RatFunc) -> RatFunc:
    c = (r.num // r.den).coeff(0)
    return r - c if c else r


def _base_text(c: Fraction) -> str:
    return "x" if c == 0 else render_poly(Poly.linear(c))


def _exp_text(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class Shape:
    monomials: tuple = ()  # ((c, r), ...) sorted by c, 0 < r < 1
    exp: RatFunc = ZERO

    def logder(self) -> RatFunc:
        acc = derive(self.exp)
        for c, r in self.monomials:
            acc = acc + RatFunc(Poly.const(r), Poly.linear(c))
        return acc

    def is_one(self) -> bool:
        return not self.monomials and self.exp.is_zero()

    def sort_key(self):
        return (len(self.monomials), self.monomials, render(self.exp))

    def __str__(self):
        return HyperexpElem(monomials=self.monomials, exp=self.exp).render()


ONE_SHAPE = Shape()


def shape_product(s: Shape, t: Shape) -> tuple[RatFunc, Shape]:
    """s * t = factor * shape with factor in Q(x)."""
    exps = dict(s.monomials)
    factor = ONE
    for c, r in t.monomials:
        v = exps.get(c, Fraction(0)) + r
        if v >= 1:
            v -= 1
            factor = factor * RatFunc(Poly.linear(c))
        exps[c] = v
    mons = tuple(sorted((c, r) for c, r in exps.items() if r))
    return factor, Shape(mons, s.exp + t.exp)


def shape_inverse(s: Shape) -> tuple[RatFunc, Shape]:
    factor = ONE
    mons = []
    for c, r in s.monomials:
        mons.append((c, 1 - r))
        factor = factor / RatFunc(Poly.linear(c))
    return factor, Shape(tuple(mons), -s.exp)


@dataclass(frozen=True)
class HyperexpElem:
    scalar: Fraction = Fraction(1)
    monomials: tuple = ()
    exp: RatFunc = ZERO
    cofactor: RatFunc = ONE

    @classmethod
    def make(cls, scalar=1, monomials=(), exp=ZERO, cofactor=ONE) -> "HyperexpElem":
        """Build an element in normal form from arbitrary components."""
        scalar = Fraction(scalar)
        cofactor = RatFunc.coerce(cofactor)
        if not scalar or cofactor.is_zero():
            raise ValueError("zero is not a hyperexponential element")
        exps: dict = {}
        for c, r in monomials:
            exps[Fraction(c)] = exps.get(Fraction(c), Fraction(0)) + Fraction(r)
        num, den = cofactor.num, cofactor.den
        scalar *= num.lc
        mult, num = linear_factorization(num.monic())
        for c, k in mult.items():
            exps[c] = exps.get(c, Fraction(0)) + k
        mult, den = linear_factorization(den)
        for c, k in mult.items():
            exps[c] = exps.get(c, Fraction(0)) - k
        mons = tuple(sorted((c, r) for c, r in exps.items() if r))
        return cls(scalar, mons, _strip_constant(RatFunc.coerce(exp)), RatFunc(num.monic(), den.monic()))

    @classmethod
    def rational(cls, f) -> "HyperexpElem":
        return cls.make(cofactor=RatFunc.coerce(f))

    @classmethod
    def power(cls, c, r) -> "HyperexpElem":
        """(x - c)^r."""
        return cls.make(monomials=((c, r),))

    def logder(self) -> RatFunc:
        """delta(h)/h."""
        acc = derive(self.exp)
        if not self.cofactor.is_constant():
            acc = acc + derive(self.cofactor) / self.cofactor
        for c, r in self.monomials:
            acc = acc + RatFunc(Poly.const(r), Poly.linear(c))
        return acc

    def __mul__(self, other):
        if isinstance(other, HyperexpElem):
            return HyperexpElem.make(
                self.scalar * other.scalar,
                self.monomials + other.monomials,
                self.exp + other.exp,
                self.cofactor * other.cofactor,
            )
        if isinstance(other, (int, Fraction, RatFunc)):
            return HyperexpElem.make(self.scalar, self.monomials, self.exp, self.cofactor * other)
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "HyperexpElem":
        return HyperexpElem.make(
            1 / self.scalar,
            tuple((c, -r) for c, r in self.monomials),
            -self.exp,
            self.cofactor.inverse(),
        )

    def __truediv__(self, other):
        if isinstance(other, HyperexpElem):
            return self * other.inverse()
        return self * RatFunc.coerce(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return HyperexpElem.make(
            self.scalar ** k,
            tuple((c, r * k) for c, r in self.monomials),
            self.exp * k,
            self.cofactor ** k,
        )

    def is_rational(self) -> bool:
        return self.exp.is_zero() and all(r.denominator == 1 for _, r in self.monomials)

    def shape(self) -> Shape:
        return self.to_tower().single()[1]

    def to_tower(self) -> "TowerElem":
        coeff = self.cofactor * self.scalar
        mons = []
        for c, r in self.monomials:
            k = math.floor(r)
            if k:
                coeff = coeff * RatFunc(Poly.linear(c)) ** k
            if r != k:
                mons.append((c, r - k))
        return TowerElem({Shape(tuple(mons), self.exp): coeff})

    def derivative(self) -> "TowerElem":
        return self.to_tower().derivative()

    def render(self) -> str:
        parts = []
        if self.cofactor != ONE:
            parts.append(f"({render(self.cofactor)})")
        for c, r in self.monomials:
            parts.append(f"({_base_text(c)})^({_exp_text(r)})")
        if not self.exp.is_zero():
            parts.append(f"exp({render(self.exp)})")
        if self.scalar != 1 or not parts:
            parts.insert(0, _exp_text(self.scalar))
        return "*".join(parts)

    def __str__(self):
        return self.render()


# ---------------------------------------------------------------------------


class TowerElem:
    """Finite sum  sum_s f_s * s  over distinct shapes s, f_s in Q(x) nonzero."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            terms = {ONE_SHAPE: RatFunc.coerce(terms)}
        self.terms = {s: f for s, f in terms.items() if not f.is_zero()}

    @classmethod
    def coerce(cls, v) -> "TowerElem":
        if isinstance(v, TowerElem):
            return v
        if isinstance(v, HyperexpElem):
            return v.to_tower()
        if isinstance(v, str):
            return parse_tower(v)
        return cls({ONE_SHAPE: RatFunc.coerce(v)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def shapes(self) -> list:
        return sorted(self.terms, key=Shape.sort_key)

    def coefficient(self, s: Shape) -> RatFunc:
        return self.terms.get(s, ZERO)

    def is_rational(self) -> bool:
        return all(s.is_one() for s in self.terms)

    def rational_part(self) -> RatFunc:
        return self.terms.get(ONE_SHAPE, ZERO)

    def __eq__(self, other):
        if not isinstance(other, TowerElem):
            try:
                other = TowerElem.coerce(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return TowerElem({s: -f for s, f in self.terms.items()})

    def __add__(self, other):
        try:
            other = TowerElem.coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self.terms)
        for s, f in other.terms.items():
            out[s] = out[s] + f if s in out else f
        return TowerElem(out)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = TowerElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return TowerElem.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            f = RatFunc.coerce(other)
            return TowerElem({s: g * f for s, g in self.terms.items()})
        try:
            other = TowerElem.coerce(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for s, f in self.terms.items():
            for t, g in other.terms.items():
                if s.is_one():
                    factor, u = ONE, t
                elif t.is_one():
                    factor, u = ONE, s
                else:
                    factor, u = shape_product(s, t)
                v = f * g * factor
                out[u] = out[u] + v if u in out else v
        return TowerElem(out)

    __rmul__ = __mul__

    def single(self) -> tuple[RatFunc, Shape]:
        if len(self.terms) != 1:
            raise ValueError(f"{self} is not a single hyperexponential term")
        ((s, f),) = self.terms.items()
        return f, s

    def is_single(self) -> bool:
        return len(self.terms) == 1

    def to_hyperexp(self) -> HyperexpElem:
        f, s = self.single()
        return HyperexpElem.make(1, s.monomials, s.exp, f)

    def inverse(self) -> "TowerElem":
        if not self.terms:
            raise DivisionByZero("inverse of zero")
        f, s = self.single()
        factor, t = shape_inverse(s)
        return TowerElem({t: factor / f})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, RatFunc)):
            return self * RatFunc.coerce(other).inverse()
        return self * TowerElem.coerce(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        acc = TowerElem(ONE)
        for _ in range(k):
            acc = acc * self
        return acc

    def derivative(self) -> "TowerElem":
        out = {}
        for s, f in self.terms.items():
            out[s] = derive(f) if s.is_one() else derive(f) + f * s.logder()
        return TowerElem(out)

    def render(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for s in self.shapes():
            f = self.terms[s]
            if s.is_one():
                text = render(f)
                pieces.append(f"({text})" if len(self.terms) > 1 and any(ch in text[1:] for ch in "+-") else text)
            else:
                pieces.append(HyperexpElem.make(1, s.monomials, s.exp, f).render())
        return " + ".join(pieces)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"TowerElem({self.render()!r})"


TOWER_ZERO = TowerElem()
TOWER_ONE = TowerElem(ONE)


def tower_matrix(rows) -> tuple:
    return tuple(tuple(TowerElem.coerce(v) if v is not None else TOWER_ZERO for v in r) for r in rows)


# ---------------------------------------------------------------------------
# parsing
#
# tower := hterm (('+'|'-') hterm)*       (split at parenthesis depth 0)
# hterm := piece ('*' piece)*
# piece := 'exp(' expr ')' | '(' expr ')^(' rational ')' | field expression

_POWER = re.compile(r"^\((.*)\)\^\((-?\d+(?:/\d+)?)\)$", re.S)
_EXP = re.compile(r"^exp\((.*)\)$", re.S)


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def _split_depth0(text: str, seps: str, keep_sign: bool):
    depth = 0
    out, start = [], 0
    prev = ""
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in seps and (not keep_sign or (prev and prev not in "^*/(+-")):
            out.append((start, text[start:i]))
            start = i + 1 if not keep_sign or ch == "+" else i
        if not ch.isspace():
            prev = ch
    out.append((start, text[start:]))
    return out


def _parse_piece(piece: str, offset: int, whole: str) -> HyperexpElem:
    s = piece.strip()
    m = _EXP.match(s)
    if m and _balanced(m.group(1)):
        return HyperexpElem.make(exp=_sub_parse(m.group(1), offset, whole))
    m = _POWER.match(s)
    if m and _balanced(m.group(1)):
        base = _sub_parse(m.group(1), offset, whole)
        r = Fraction(m.group(2))
        if r.denominator == 1:
            if base.is_zero() and r < 0:
                raise DivisionByZero(f"zero to a negative power at offset {offset}")
            return HyperexpElem.rational(base ** int(r))
        if base.den != ONE_POLY or base.num.degree != 1:
            raise ParseError("fractional powers need a linear base", whole, offset)
        lc = base.num.lc
        if lc != 1:
            raise ParseError("fractional powers need a monic linear base", whole, offset)
        return HyperexpElem.power(-base.num.coeff(0), r)
    f = _sub_parse(s, offset, whole)
    if f.is_zero():
        raise ValueError("zero factor")
    return HyperexpElem.rational(f)


def _sub_parse(text: str, offset: int, whole: str) -> RatFunc:
    try:
        return parse(text)
    except ParseError as e:
        raise ParseError(e.msg, whole, offset + e.offset) from None


def parse_hyperexp(text: str) -> HyperexpElem:
    """Parse the canonical rendering (or any product of pieces)."""
    try:
        return HyperexpElem.rational(parse(text))
    except ParseError:
        pass
    acc = HyperexpElem()
    for off, piece in _split_depth0(text, "*", keep_sign=False):
        if not piece.strip():
            raise ParseError("empty factor", text, off)
        acc = acc * _parse_piece(piece, off, text)
    return acc


def parse_tower(text: str) -> TowerElem:
    try:
        return TowerElem(parse(text))
    except ParseError:
        pass
    acc = TOWER_ZERO
    for off, chunk in _split_depth0(text, "+-", keep_sign=True):
        c = chunk.strip()
        if not c:
            continue
        neg = c.startswith("-")
        if neg:
            c = c[1:]
        h = parse_hyperexp(c).to_tower()
        acc = acc - h if neg else acc + h
    return acc
