"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a map from monomials to :class:`fractions.Fraction`
coefficients.  A monomial is a tuple of ``(variable, exponent)`` pairs
sorted by variable name, with no zero exponents, so ``()`` is the unit
monomial.  Polynomials are immutable values; every operation returns a
new canonical polynomial.

Text form::

    >>> p = parse_poly("x + y^2", ["x", "y"])
    >>> str(p)
    'y^2 + x'
    >>> str(p * p - parse_poly("2*x*y^2", ["x", "y"]))
    'y^4 + x^2'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (
    MissingVariableError,
    NotDivisibleError,
    ParseError,
    UnknownVariableError,
)

Monomial = tuple  # tuple[tuple[str, int], ...]

_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def is_var_name(name: str) -> bool:
    return bool(_NAME_RE.match(name))


def var_key(name: str):
    """Natural sort key for variable names (x2 before x10)."""
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", name)]


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text: str) -> Fraction:
    s = text.strip()
    if not re.fullmatch(r"-?\d+(/\d+)?", s):
        raise ParseError(f"malformed rational {text!r}")
    num, _, den = s.partition("/")
    if den and int(den) == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(q: Fraction) -> str:
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class Polynomial:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean
        self._hash = None

    # construction ---------------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # terms already canonical: no zero coefficients, Fraction values
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c) -> "Polynomial":
        c = as_fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "Polynomial":
        if power == 0:
            return cls.const(1)
        return cls._raw({((name, power),): Fraction(1)})

    @classmethod
    def coerce(cls, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return cls.const(other)

    # inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def variables(self) -> set:
        return {v for m in self._terms for v, _ in m}

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self._terms), default=-1)

    def degree_in(self, x: str) -> int:
        return max((dict(m).get(x, 0) for m in self._terms), default=-1)

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        other = Polynomial.coerce(other)
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-Polynomial.coerce(other))

    def __rsub__(self, other):
        return Polynomial.coerce(other) - self

    def scale(self, c) -> "Polynomial":
        c = as_fraction(c)
        if not c:
            return Polynomial()
        return Polynomial._raw({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            return Polynomial._raw({mono_mul(m, mb): c * cb for m, c in a.items()})
        out: dict = {}
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return Polynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # calculus and evaluation ---------------------------------------------

    def eval(self, point: Mapping[str, Fraction]) -> Fraction:
        return evaluate(self, point)

    def partial(self, x: str) -> "Polynomial":
        return partial(self, x)

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        return substitute(self, images)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({format_poly(self)!r})"


def evaluate(p: Polynomial, point: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    powers: dict = {}
    for m, c in p.terms.items():
        term = c
        for v, e in m:
            key = (v, e)
            val = powers.get(key)
            if val is None:
                try:
                    base = point[v]
                except KeyError:
                    raise MissingVariableError(f"no value for variable {v!r}") from None
                val = powers[key] = base ** e
            term *= val
        total += term
    return total


def partial(p: Polynomial, x: str) -> Polynomial:
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        e = d.get(x, 0)
        if not e:
            continue
        if e == 1:
            del d[x]
        else:
            d[x] = e - 1
        out[tuple(sorted(d.items()))] = c * e
    return Polynomial._raw(out)


def substitute(p: Polynomial, images: Mapping[str, Polynomial]) -> Polynomial:
    powers: dict = {}
    out = Polynomial()
    for m, c in p.terms.items():
        term = Polynomial.const(c)
        for v, e in m:
            key = (v, e)
            val = powers.get(key)
            if val is None:
                try:
                    img = images[v]
                except KeyError:
                    raise MissingVariableError(f"no image for variable {v!r}") from None
                val = powers[key] = Polynomial.coerce(img) ** e
            term = term * val
        out = out + term
    return out


def divide_by_var(p: Polynomial, x: str) -> Polynomial:
    """Exact quotient ``p / x``; every monomial must contain ``x``."""
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        e = d.get(x, 0)
        if not e:
            raise NotDivisibleError(f"{format_poly(p)} is not divisible by {x}")
        if e == 1:
            del d[x]
        else:
            d[x] = e - 1
        out[tuple(sorted(d.items()))] = c
    return Polynomial._raw(out)


# univariate helpers ----------------------------------------------------------

def from_roots(var: str, roots: Iterable[Fraction], lead=1) -> Polynomial:
    """``lead * prod (var - r)``."""
    z = Polynomial.var(var)
    out = Polynomial.const(lead)
    for r in roots:
        out = out * (z - as_fraction(r))
    return out


def lagrange(var: str, xs, ys) -> Polynomial:
    """Unique polynomial of degree < len(xs) in ``var`` through (xs, ys)."""
    xs = [as_fraction(x) for x in xs]
    ys = [as_fraction(y) for y in ys]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    z = Polynomial.var(var)
    out = Polynomial()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        basis = Polynomial.const(1)
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * (z - xj)
                denom *= xi - xj
        out = out + basis.scale(yi / denom)
    return out


# printing --------------------------------------------------------------------

def grlex_key(m: Monomial, order: list):
    d = dict(m)
    return (mono_degree(m), tuple(d.get(v, 0) for v in order))


def _format_mono(m: Monomial) -> str:
    parts = []
    for v, e in sorted(m, key=lambda ve: var_key(ve[0])):
        parts.append(v if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def format_poly(p: Polynomial) -> str:
    """Canonical text: graded-lex descending, signs folded into the joins."""
    if p.is_zero():
        return "0"
    order = sorted(p.variables(), key=var_key)
    monos = sorted(p.terms, key=lambda m: grlex_key(m, order), reverse=True)
    out = []
    for i, m in enumerate(monos):
        c = p.terms[m]
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = format_rational(a)
        elif a == 1:
            body = _format_mono(m)
        else:
            body = f"{format_rational(a)}*{_format_mono(m)}"
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


# parsing ---------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-z][a-z0-9_]*)|([-+*^/()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", pos, text[pos])
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            tokens.append(("op", m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, allowed):
        self.tokens = _tokenize(text)
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what="unexpected token"):
        if tok[0] == "end":
            raise ParseError("unexpected end of input", tok[2])
        raise ParseError(what, tok[2], tok[1])

    def parse(self):
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.fail(tok)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[:2] == ("op", "*"):
            self.take()
            p = p * self.unary()
        return p

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self.fail(tok, "exponent must be a non-negative integer")
            base = base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "int":
            num = int(val)
            if self.peek()[:2] == ("op", "/"):
                self.take()
                den_tok = self.take()
                if den_tok[0] != "int":
                    self.fail(den_tok, "rational literal needs an integer denominator")
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator", den_tok[2], den_tok[1])
                return Polynomial.const(Fraction(num, den))
            return Polynomial.const(num)
        if kind == "name":
            if self.allowed is not None and val not in self.allowed:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, val)
            return Polynomial.var(val)
        if (kind, val) == ("op", "("):
            p = self.expr()
            close = self.take()
            if close[:2] != ("op", ")"):
                self.fail(close, "expected ')'")
            return p
        self.fail(tok)


def parse_poly(text: str, vars: Iterable[str] | None = None) -> Polynomial:
    """Parse ``text``; identifiers must belong to ``vars`` when given."""
    allowed = None if vars is None else set(vars)
    return _Parser(text, allowed).parse()
