"""Run options and deterministic generic choices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Iterator, Optional

from .derivation import DEFAULT_CAP
from .errors import ExhaustionError

DEFAULT_GENERIC_CAP = 10_000


@dataclass(frozen=True)
class ChoiceAlphaConfig:
    """Case-3 contraction parameters.

    ``epsilon`` is a fixed value or ``None`` for ``(B - A) * epsilon_fraction``
    on the magnitude interval ``(A, B)``; it must stay below ``(B - A) / 2``.
    """

    epsilon: Optional[Fraction] = None
    epsilon_fraction: Fraction = Fraction(1, 4)
    max_iterations: int = 10_000

    def epsilon_for(self, lo: Fraction, hi: Fraction) -> Fraction:
        eps = self.epsilon if self.epsilon is not None else (hi - lo) * self.epsilon_fraction
        eps = Fraction(eps)
        if not 0 < eps < (hi - lo) / 2:
            raise ValueError(f"epsilon {eps} outside (0, {(hi - lo) / 2})")
        return eps


@dataclass(frozen=True)
class EngineOptions:
    nilpotency_cap: int = DEFAULT_CAP
    generic_cap: int = DEFAULT_GENERIC_CAP
    alpha: ChoiceAlphaConfig = field(default_factory=ChoiceAlphaConfig)


def integer_candidates() -> Iterator[Fraction]:
    """1, -1, 2, -2, 3, ..."""
    k = 1
    while True:
        yield Fraction(k)
        yield Fraction(-k)
        k += 1


def unit_fractions() -> Iterator[Fraction]:
    """Rationals in (0, 1) by increasing denominator: 1/2, 1/3, 2/3, 1/4, ..."""
    d = 2
    while True:
        for k in range(1, d):
            if gcd(k, d) == 1:
                yield Fraction(k, d)
        d += 1


def rationals_in(lo: Fraction, hi: Fraction) -> Iterator[Fraction]:
    """Deterministic enumeration of rationals in the open interval (lo, hi)."""
    width = hi - lo
    for s in unit_fractions():
        yield lo + width * s


def first_satisfying(candidates: Iterable[Fraction],
                     predicates: Iterable[Callable[[Fraction], bool]],
                     cap: int = DEFAULT_GENERIC_CAP) -> Fraction:
    preds = list(predicates)
    for i, t in enumerate(candidates):
        if i >= cap:
            break
        if all(p(t) for p in preds):
            return t
    raise ExhaustionError(f"no candidate within {cap} tries satisfies all predicates")


def generic_param(predicates: Iterable[Callable[[Fraction], bool]] = (),
                  cap: int = DEFAULT_GENERIC_CAP) -> Fraction:
    """First of 1, -1, 2, -2, ... passing every predicate.

    Callers guarantee each predicate fails on finitely many values only.
    """
    return first_satisfying(integer_candidates(), predicates, cap)
