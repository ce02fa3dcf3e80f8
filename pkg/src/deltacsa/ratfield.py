"""Exact arithmetic in Q(x) with the derivation d/dx.

Polynomials are dense tuples of :class:`fractions.Fraction` (lowest degree
first).  A :class:`RatFunc` is always stored reduced, with a monic
denominator, so structural equality is value equality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isqrt
from typing import Iterable, Union

from .errors import DivisionByZero, NonSplitDenominator, ParseError

_ZERO = Fraction(0)
_ONE = Fraction(1)


class Poly:
    """Dense univariate polynomial over Q."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [v if type(v) is Fraction else Fraction(v) for v in coeffs]
        while c and not c[-1]:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def _raw(cls, c: tuple) -> "Poly":
        p = object.__new__(cls)
        p.c = c
        return p

    @classmethod
    def const(cls, v) -> "Poly":
        return cls((v,))

    @classmethod
    def x(cls) -> "Poly":
        return cls._raw((_ZERO, _ONE))

    @classmethod
    def linear(cls, root) -> "Poly":
        """The monic factor x - root."""
        return cls((-Fraction(root), 1))

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def lc(self) -> Fraction:
        return self.c[-1] if self.c else _ZERO

    def is_zero(self) -> bool:
        return not self.c

    def is_one(self) -> bool:
        return self.c == (_ONE,)

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == Poly.const(other).c
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"Poly({render_poly(self)!r})"

    def __str__(self):
        return render_poly(self)

    def __neg__(self):
        return Poly._raw(tuple(-v for v in self.c))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            s = Fraction(other)
            if not s:
                return ZERO_POLY
            return Poly._raw(tuple(v * s for v in self.c))
        a, b = self.c, other.c
        if not a or not b:
            return ZERO_POLY
        out = [_ZERO] * (len(a) + len(b) - 1)
        for i, u in enumerate(a):
            if u:
                for j, v in enumerate(b):
                    out[i + j] += u * v
        return Poly._raw(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = ONE_POLY
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other: "Poly"):
        if not other.c:
            raise DivisionByZero("polynomial division by zero")
        r = list(self.c)
        db = len(other.c) - 1
        inv = 1 / other.c[-1]
        if len(r) - 1 < db:
            return ZERO_POLY, self
        q = [_ZERO] * (len(r) - db)
        for k in range(len(r) - 1 - db, -1, -1):
            t = r[k + db] * inv
            q[k] = t
            if t:
                for j, v in enumerate(other.c):
                    r[k + j] -= t * v
        return Poly(q), Poly(r[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __call__(self, at):
        acc = _ZERO
        for v in reversed(self.c):
            acc = acc * at + v
        return acc

    def derivative(self) -> "Poly":
        return Poly._raw(tuple(i * v for i, v in enumerate(self.c) if i))

    def antiderivative(self) -> "Poly":
        """Integral with zero constant term."""
        if not self.c:
            return ZERO_POLY
        return Poly._raw((_ZERO,) + tuple(v / (i + 1) for i, v in enumerate(self.c)))

    def monic(self) -> "Poly":
        if not self.c or self.c[-1] == 1:
            return self
        inv = 1 / self.c[-1]
        return Poly._raw(tuple(v * inv for v in self.c))

    def shift(self, a) -> "Poly":
        """p(x + a) by repeated synthetic division."""
        a = Fraction(a)
        c = list(self.c)
        n = len(c)
        for i in range(n):
            for j in range(n - 2, i - 1, -1):
                c[j] += a * c[j + 1]
        return Poly(c)

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if 0 <= k < len(self.c) else _ZERO


ZERO_POLY = Poly._raw(())
ONE_POLY = Poly._raw((_ONE,))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; gcd(0, 0) = 0."""
    while b.c:
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    if p.degree < 1:
        return p.monic()
    return (p // poly_gcd(p, p.derivative())).monic()


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots of p, ascending."""
    if p.degree < 1:
        return []
    p = squarefree_part(p)
    roots = []
    if p.c[0] == 0:
        roots.append(_ZERO)
        while p.c and p.c[0] == 0:
            p = Poly._raw(p.c[1:])
    if p.degree >= 1:
        den = reduce(lambda acc, v: acc * v.denominator // gcd(acc, v.denominator), p.c, 1)
        ints = [int(v * den) for v in p.c]
        for q in _divisors(ints[-1]):
            for r in _divisors(ints[0]):
                if gcd(r, q) != 1:
                    continue
                for cand in (Fraction(r, q), Fraction(-r, q)):
                    if p.degree >= 1 and p(cand) == 0:
                        roots.append(cand)
                        p = p // Poly.linear(cand)
    return sorted(roots)


def linear_factorization(p: Poly) -> tuple[dict, Poly]:
    """Split p = lc * prod (x - c)^k * rest with rest free of rational roots.

    Returns ({c: k}, rest) where rest keeps the leading coefficient.
    """
    mult = {}
    for c in rational_roots(p):
        f = Poly.linear(c)
        k = 0
        while True:
            q, r = divmod(p, f)
            if r.c:
                break
            p, k = q, k + 1
        mult[c] = k
    return mult, p


Number = Union[int, Fraction]


class RatFunc:
    """Element of Q(x): reduced numerator over monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if not isinstance(den, Poly):
            den = Poly.const(den)
        if not den.c:
            raise DivisionByZero("zero denominator")
        if not num.c:
            self.num, self.den = ZERO_POLY, ONE_POLY
            return
        if den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lc = den.c[-1]
        if lc != 1:
            num, den = num * (1 / lc), den.monic()
        self.num, self.den = num, den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFunc":
        f = object.__new__(cls)
        f.num, f.den = num, den
        return f

    @classmethod
    def x(cls) -> "RatFunc":
        return cls._raw(Poly.x(), ONE_POLY)

    @classmethod
    def coerce(cls, v) -> "RatFunc":
        if isinstance(v, RatFunc):
            return v
        if isinstance(v, Poly):
            return cls._raw(v, ONE_POLY)
        if isinstance(v, (int, Fraction)):
            return cls._raw(Poly.const(v), ONE_POLY)
        if isinstance(v, str):
            return parse(v)
        raise TypeError(f"cannot coerce {type(v).__name__} to RatFunc")

    def is_zero(self) -> bool:
        return not self.num.c

    def __bool__(self):
        return bool(self.num.c)

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.coeff(0)

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction, Poly)):
            return self == RatFunc.coerce(other)
        return NotImplemented

    def __hash__(self):
        if self.den.degree == 0 and self.num.degree <= 0:
            return hash(self.num.coeff(0))
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({render(self)!r})"

    def __str__(self):
        return render(self)

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __add__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.num.c:
            return self
        if not self.num.c:
            return other
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num.c or not other.num.c:
            return ZERO
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num.c:
            raise DivisionByZero("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc._raw(self.num ** k, self.den ** k)

    def derive(self) -> "RatFunc":
        return derive(self)

    def __call__(self, at):
        d = self.den(at)
        if d == 0:
            raise DivisionByZero(f"pole at {at}")
        return self.num(at) / d


ZERO = RatFunc._raw(ZERO_POLY, ONE_POLY)
ONE = RatFunc._raw(ONE_POLY, ONE_POLY)


def derive(f: RatFunc) -> RatFunc:
    """d/dx of f, reduced."""
    if f.den.degree == 0:
        return RatFunc._raw(f.num.derivative(), ONE_POLY)
    return RatFunc(f.num.derivative() * f.den - f.num * f.den.derivative(), f.den * f.den)


# ---------------------------------------------------------------------------
# partial fractions


@dataclass(frozen=True)
class PartialFraction:
    """f = polynomial + sum coeff / (x - pole)^order."""

    polynomial: Poly
    terms: tuple  # of (pole, order, coeff), sorted by (pole, order)

    def to_ratfunc(self) -> RatFunc:
        acc = RatFunc.coerce(self.polynomial)
        for c, k, a in self.terms:
            acc = acc + RatFunc(Poly.const(a), Poly.linear(c) ** k)
        return acc

    def poles(self) -> list[Fraction]:
        return sorted({c for c, _, _ in self.terms})

    def residue(self, pole) -> Fraction:
        for c, k, a in self.terms:
            if c == pole and k == 1:
                return a
        return _ZERO

    def residues(self) -> dict:
        return {c: a for c, k, a in self.terms if k == 1}

    def nonlog_part(self) -> RatFunc:
        """Everything except the simple-pole terms (integrates to a rational function)."""
        acc = RatFunc.coerce(self.polynomial)
        for c, k, a in self.terms:
            if k > 1:
                acc = acc + RatFunc(Poly.const(a), Poly.linear(c) ** k)
        return acc

    def nonlog_antiderivative(self) -> RatFunc:
        """Antiderivative of :meth:`nonlog_part` with zero constant term."""
        acc = RatFunc.coerce(self.polynomial.antiderivative())
        for c, k, a in self.terms:
            if k > 1:
                acc = acc + RatFunc(Poly.const(a / (1 - k)), Poly.linear(c) ** (k - 1))
        return acc


def _series_quotient(n: Poly, d: Poly, terms: int) -> list[Fraction]:
    """First coefficients of the power series n/d at 0 (d(0) != 0)."""
    d0 = d.coeff(0)
    out = []
    for j in range(terms):
        acc = n.coeff(j)
        for i in range(1, j + 1):
            acc -= d.coeff(i) * out[j - i]
        out.append(acc / d0)
    return out


def partial_fractions(f: RatFunc) -> PartialFraction:
    """Full decomposition over Q; raises NonSplitDenominator otherwise."""
    f = RatFunc.coerce(f)
    q, r = divmod(f.num, f.den)
    if f.den.degree == 0:
        return PartialFraction(q, ())
    mult, rest = linear_factorization(f.den)
    if rest.degree > 0:
        raise NonSplitDenominator(f"denominator of {render(f)} has factor {render_poly(rest.monic())} irreducible over Q")
    terms = []
    for c, k in sorted(mult.items()):
        g = f.den // (Poly.linear(c) ** k)
        s = _series_quotient(r.shift(c), g.shift(c), k)
        for j, a in enumerate(s):
            if a:
                terms.append((c, k - j, a))
    terms.sort(key=lambda t: (t[0], t[1]))
    return PartialFraction(q, tuple(terms))


def is_split(f: RatFunc) -> bool:
    """True when the denominator of f splits into linear factors over Q."""
    return linear_factorization(f.den)[1].degree <= 0


# ---------------------------------------------------------------------------
# rendering


def _render_fraction(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def render_poly(p: Poly) -> str:
    if not p.c:
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        a = p.c[k]
        if not a:
            continue
        if k == 0:
            t = _render_fraction(a)
        else:
            mono = "x" if k == 1 else f"x^{k}"
            if a == 1:
                t = mono
            elif a == -1:
                t = "-" + mono
            else:
                t = f"{_render_fraction(a)}*{mono}"
        if parts and not t.startswith("-"):
            t = "+" + t
        parts.append(t)
    return "".join(parts)


def _nterms(p: Poly) -> int:
    return sum(1 for v in p.c if v)


def render(f: RatFunc) -> str:
    """Canonical text: expanded numerator over monic denominator."""
    f = RatFunc.coerce(f)
    ns = render_poly(f.num)
    if f.den.degree == 0:
        return ns
    if _nterms(f.num) > 1:
        ns = f"({ns})"
    ds = render_poly(f.den)
    if _nterms(f.den) > 1:
        ds = f"({ds})"
    return f"{ns}/{ds}"


# ---------------------------------------------------------------------------
# parsing
#
# expr   := ['-'] term (('+'|'-') ['-'] term)*
# term   := factor (('*'|'/') factor)*
# factor := base ('^' ['-'] integer)?
# base   := integer | 'x' | '(' expr ')'


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg, pos=None):
        pos = self.pos if pos is None else pos
        raise ParseError(msg, self.text, len(self.text[:pos].encode()))

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch):
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected integer")
        return int(self.text[start:self.pos])

    def expr(self) -> RatFunc:
        neg = False
        while self.take("-"):
            neg = not neg
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            ch = self.peek()
            if ch not in ("+", "-"):
                return acc
            self.pos += 1
            neg = ch == "-"
            while self.take("-"):
                neg = not neg
            t = self.term()
            acc = acc - t if neg else acc + t

    def term(self) -> RatFunc:
        acc = self.factor()
        while True:
            ch = self.peek()
            if ch == "*":
                self.pos += 1
                acc = acc * self.factor()
            elif ch == "/":
                self.pos += 1
                at = self.pos
                d = self.factor()
                if d.is_zero():
                    raise DivisionByZero(f"division by zero at offset {len(self.text[:at].encode())}")
                acc = acc / d
            else:
                return acc

    def factor(self) -> RatFunc:
        base = self.base()
        if self.take("^"):
            neg = self.take("-")
            at = self.pos
            k = self.integer()
            if neg:
                if base.is_zero():
                    raise DivisionByZero(f"zero to a negative power at offset {len(self.text[:at].encode())}")
                return base ** (-k)
            return base ** k
        return base

    def base(self) -> RatFunc:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            v = self.expr()
            if not self.take(")"):
                self.error("expected ')'")
            return v
        if ch == "x":
            self.pos += 1
            return RatFunc.x()
        if ch.isdigit():
            return RatFunc.coerce(self.integer())
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")


def parse(text: str) -> RatFunc:
    """Parse an expression in the field grammar into a normalized RatFunc."""
    p = _Parser(text)
    v = p.expr()
    if p.peek():
        p.error(f"unexpected trailing {p.peek()!r}")
    return v


X = RatFunc.x()
