"""Derivations of a polynomial ring, exponential flows and automorphism scripts.

Convention: scripts act on points, and the leftmost step is applied first.
An endomorphism stores, for each variable, the polynomial giving that
coordinate of the image point; so ``compose(a, b)`` means "a, then b" and its
images are ``b.images[v]`` with ``a.images`` substituted in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping

from .errors import CapExceededError, MissingVariableError, VariableMismatchError
from .polyring import Polynomial, as_fraction, evaluate, format_poly, partial, substitute, var_key

DEFAULT_CAP = 64


@dataclass(frozen=True, eq=False)
class Derivation:
    """A derivation given by its value on each generator of the ring."""

    images: Mapping[str, Polynomial]
    label: str = ""
    _series: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "images", dict(self.images))

    @property
    def variables(self) -> list:
        return sorted(self.images, key=var_key)

    def image(self, x: str) -> Polynomial:
        return self.images[x]

    def __call__(self, p: Polynomial) -> Polynomial:
        return apply_derivation(self, p)

    def __eq__(self, other):
        return isinstance(other, Derivation) and self.images == other.images

    def __hash__(self):
        return hash(frozenset(self.images.items()))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.images.values())

    def series(self, x: str, cap: int = DEFAULT_CAP) -> list:
        """``[x, d(x), d^2(x), ...]`` up to the last nonzero term."""
        cached = self._series.get(x)
        if cached is not None:
            return cached
        terms = [Polynomial.var(x)]
        while True:
            nxt = apply_derivation(self, terms[-1])
            if nxt.is_zero():
                break
            if len(terms) >= cap:
                raise CapExceededError(
                    f"derivation {self.label or '?'} not nilpotent on {x} within cap {cap}")
            terms.append(nxt)
        self._series[x] = terms
        return terms

    def __str__(self):
        body = ", ".join(f"{v} -> {format_poly(self.images[v])}" for v in self.variables)
        return f"{{{body}}}"


def apply_derivation(d: Derivation, p: Polynomial) -> Polynomial:
    """Leibniz extension of ``d`` applied to ``p``."""
    out = Polynomial()
    for x in p.variables():
        try:
            img = d.images[x]
        except KeyError:
            raise MissingVariableError(f"derivation has no value on {x!r}") from None
        if img.is_zero():
            continue
        out = out + partial(p, x) * img
    return out


def nilpotency_order(d: Derivation, p: Polynomial, cap: int = DEFAULT_CAP) -> int:
    """Smallest ``N <= cap`` with ``d^N(p) == 0``."""
    if cap < 1:
        raise ValueError("cap must be positive")
    cur = p
    for n in range(cap + 1):
        if cur.is_zero():
            return n
        if n == cap:
            break
        cur = apply_derivation(d, cur)
    raise CapExceededError(f"d^N(p) nonzero for all N <= {cap}")


# endomorphisms ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PolyEndomorphism:
    images: Mapping[str, Polynomial]

    def __post_init__(self):
        object.__setattr__(self, "images", dict(self.images))

    @classmethod
    def identity(cls, variables: Iterable[str]) -> "PolyEndomorphism":
        return cls({v: Polynomial.var(v) for v in variables})

    @property
    def variables(self) -> list:
        return sorted(self.images, key=var_key)

    def is_identity(self) -> bool:
        return all(p == Polynomial.var(v) for v, p in self.images.items())

    def act(self, point: Mapping[str, Fraction]) -> dict:
        out = dict(point)
        for v, p in self.images.items():
            out[v] = evaluate(p, point)
        return out

    def __eq__(self, other):
        return isinstance(other, PolyEndomorphism) and self.images == other.images

    def __hash__(self):
        return hash(frozenset(self.images.items()))

    def __str__(self):
        return "{" + ", ".join(f"{v} -> {format_poly(self.images[v])}" for v in self.variables) + "}"


def compose(a: PolyEndomorphism, b: PolyEndomorphism) -> PolyEndomorphism:
    """The map "apply ``a``, then ``b``"."""
    if set(a.images) != set(b.images):
        raise VariableMismatchError("endomorphisms act on different variable sets")
    return PolyEndomorphism({v: substitute(p, a.images) for v, p in b.images.items()})


# flows and scripts -----------------------------------------------------------

@dataclass(frozen=True)
class FlowStep:
    """``exp(time * derivation)``; ``stage`` names the construction that emitted it."""

    derivation: Derivation
    time: Fraction
    stage: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "time", as_fraction(self.time))

    def inverse(self) -> "FlowStep":
        return FlowStep(self.derivation, -self.time, self.stage)

    def act(self, point: Mapping[str, Fraction], cap: int = DEFAULT_CAP) -> dict:
        t = self.time
        out = dict(point)
        if not t:
            return out
        for x in self.derivation.images:
            terms = self.derivation.series(x, cap)
            val = point[x]
            tk = Fraction(1)
            for k in range(1, len(terms)):
                tk = tk * t / k
                val += tk * evaluate(terms[k], point)
            out[x] = val
        return out


def exp_flow(step: FlowStep, cap: int = DEFAULT_CAP) -> PolyEndomorphism:
    """Images ``x -> sum_k t^k/k! d^k(x)``; the series stops at nilpotency."""
    t = step.time
    images = {}
    for x in step.derivation.images:
        if not t:
            images[x] = Polynomial.var(x)
            continue
        terms = step.derivation.series(x, cap)
        acc = Polynomial()
        for k, term in enumerate(terms):
            acc = acc + term.scale(t ** k / factorial(k))
        images[x] = acc
    return PolyEndomorphism(images)


@dataclass(frozen=True)
class AutomorphismScript:
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __add__(self, other: "AutomorphismScript") -> "AutomorphismScript":
        return AutomorphismScript(self.steps + other.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def inverse(self) -> "AutomorphismScript":
        return invert_script(self)

    def act(self, point: Mapping[str, Fraction], cap: int = DEFAULT_CAP) -> dict:
        out = dict(point)
        for step in self.steps:
            out = step.act(out, cap) if isinstance(step, FlowStep) else step.act(out)
        return out


def invert_script(s: AutomorphismScript) -> AutomorphismScript:
    return AutomorphismScript(tuple(step.inverse() for step in reversed(s.steps)))


def realize(s: AutomorphismScript, variables: Iterable[str] | None = None,
            cap: int = DEFAULT_CAP) -> PolyEndomorphism:
    """Compose the flows of ``s`` left to right; empty script gives identity."""
    if variables is None:
        if not s.steps:
            raise ValueError("variables required to realize an empty script")
        variables = s.steps[0].derivation.images
    result = PolyEndomorphism.identity(variables)
    for step in s.steps:
        result = compose(result, exp_flow(step, cap))
    return result


def zero_derivation(variables: Iterable[str], label: str = "0") -> Derivation:
    return Derivation({v: Polynomial() for v in variables}, label)


def coordinate_field(variables: Iterable[str], x: str) -> Derivation:
    """The derivation d/dx."""
    return Derivation({v: Polynomial.const(1 if v == x else 0) for v in variables}, f"d/d{x}")
