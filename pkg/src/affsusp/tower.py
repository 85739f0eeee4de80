"""Iterated suspensions over affine space.

A tower of depth ``d`` over ``A^n`` lives in ``A^(n + 2d)`` with relations
``u_i v_i - f_i = 0``, where ``f_i`` only involves the base variables and
the suspension variables of levels below ``i``.  Levels are numbered from 1;
"depth k" truncation keeps the base and the first ``k`` levels.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from . import linalg
from .derivation import Derivation, apply_derivation
from .errors import (
    ConstantFunctionError,
    MissingVariableError,
    OffVarietyError,
    PreconditionError,
    VariableClashError,
)
from .polyring import Polynomial, as_fraction, divide_by_var, evaluate, format_poly, format_rational, is_var_name, partial


class TowerPoint(Mapping):
    """Immutable coordinate map ``variable -> Fraction``."""

    __slots__ = ("_coords", "_hash")

    def __init__(self, coords: Mapping):
        self._coords = {k: as_fraction(v) for k, v in coords.items()}
        self._hash = None

    def __getitem__(self, key):
        return self._coords[key]

    def __iter__(self):
        return iter(self._coords)

    def __len__(self):
        return len(self._coords)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._coords.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._coords == dict(other)
        return NotImplemented

    def restrict(self, variables: Iterable[str]) -> "TowerPoint":
        return TowerPoint({v: self._coords[v] for v in variables})

    def replace(self, **coords) -> "TowerPoint":
        out = dict(self._coords)
        out.update({k: as_fraction(v) for k, v in coords.items()})
        return TowerPoint(out)

    def __repr__(self):
        body = ", ".join(f"{k}={format_rational(v)}" for k, v in self._coords.items())
        return f"TowerPoint({body})"


@dataclass(frozen=True)
class SuspensionLevel:
    u_var: str
    v_var: str
    f: Polynomial

    @property
    def relation(self) -> Polynomial:
        return Polynomial.var(self.u_var) * Polynomial.var(self.v_var) - self.f


class Side(enum.Enum):
    U = "U"
    V = "V"

    @property
    def other(self) -> "Side":
        return Side.V if self is Side.U else Side.U


@dataclass(frozen=True)
class LevelSet:
    """The section ``{u = value}`` (side U) or ``{v = value}`` (side V) of a level."""

    level_index: int
    side: Side
    value: Fraction


@dataclass(frozen=True)
class SuspensionTower:
    base_vars: tuple
    levels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "base_vars", tuple(self.base_vars))
        object.__setattr__(self, "levels", tuple(self.levels))
        if len(self.base_vars) < 2:
            raise PreconditionError("base dimension must be at least 2")
        names = self.variables
        if len(set(names)) != len(names):
            raise VariableClashError("variable names must be distinct")
        for name in names:
            if not is_var_name(name):
                raise PreconditionError(f"bad variable name {name!r}")

    @classmethod
    def affine(cls, base_vars: Iterable[str]) -> "SuspensionTower":
        return cls(tuple(base_vars))

    @property
    def base_dim(self) -> int:
        return len(self.base_vars)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def dim(self) -> int:
        return self.base_dim + self.depth

    @property
    def variables(self) -> list:
        out = list(self.base_vars)
        for lv in self.levels:
            out += [lv.u_var, lv.v_var]
        return out

    def level(self, i: int) -> SuspensionLevel:
        return self.levels[i - 1]

    def truncate(self, k: int) -> "SuspensionTower":
        return SuspensionTower(self.base_vars, self.levels[:k])

    @property
    def relations(self) -> list:
        return [lv.relation for lv in self.levels]

    def describe(self) -> str:
        rels = "; ".join(f"{format_poly(r)} = 0" for r in self.relations) or "none"
        return f"A^{self.base_dim}({', '.join(self.base_vars)}), depth {self.depth}: {rels}"


def suspend(t: SuspensionTower, f: Polynomial, u: str, v: str) -> SuspensionTower:
    if f.is_constant():
        raise ConstantFunctionError("suspension function must be non-constant")
    known = set(t.variables)
    stray = f.variables() - known
    if stray:
        raise VariableClashError(f"f uses unknown variables {sorted(stray)}")
    if u == v or u in known or v in known:
        raise VariableClashError(f"suspension variables {u!r}, {v!r} must be fresh")
    return SuspensionTower(t.base_vars, t.levels + (SuspensionLevel(u, v, f),))


def check_point(t: SuspensionTower, coords: Mapping) -> TowerPoint:
    missing = [v for v in t.variables if v not in coords]
    if missing:
        raise MissingVariableError(f"point lacks coordinates {missing}")
    p = TowerPoint({v: coords[v] for v in t.variables})
    for i, rel in enumerate(t.relations, start=1):
        val = evaluate(rel, p)
        if val:
            raise OffVarietyError(
                f"relation of level {i} ({format_poly(rel)}) evaluates to {format_rational(val)}",
                level=i)
    return p


def jacobian(t: SuspensionTower, p: Mapping) -> list:
    return [[evaluate(partial(rel, x), p) for x in t.variables] for rel in t.relations]


def is_regular(t: SuspensionTower, p: Mapping) -> bool:
    if not t.levels:
        return True
    return linalg.rank(jacobian(t, p)) == t.depth


def project(t: SuspensionTower, p: Mapping, to_level: int) -> TowerPoint:
    """Restrict ``p`` to the base and the first ``to_level`` levels."""
    return TowerPoint({v: p[v] for v in t.truncate(to_level).variables})


def is_hyperbolic(t: SuspensionTower, p: Mapping, level: int) -> bool:
    lv = t.level(level)
    return p[lv.u_var] != 0 and p[lv.v_var] != 0


def preserves_relations(d: Derivation, t: SuspensionTower) -> bool:
    """True iff ``d`` kills every relation identically in the ambient ring."""
    return all(apply_derivation(d, rel).is_zero() for rel in t.relations)


def failing_relations(d: Derivation, t: SuspensionTower) -> list:
    return [i for i, rel in enumerate(t.relations, start=1)
            if not apply_derivation(d, rel).is_zero()]


def lift_derivation(d0: Derivation, q: Polynomial, level: SuspensionLevel, side: Side) -> Derivation:
    """Extend ``d0`` (on the variables below ``level``) to the level.

    Side V: lower variables go to ``q(v) d0(.)``, ``v`` to 0 and ``u`` to
    ``q(v)/v * d0(f)``; side U swaps the roles of ``u`` and ``v``.
    """
    keep, moved = (level.v_var, level.u_var) if side is Side.V else (level.u_var, level.v_var)
    stray = q.variables() - {keep}
    if stray:
        raise PreconditionError(f"multiplier must be a polynomial in {keep} only")
    quotient = divide_by_var(q, keep)
    images = {x: q * img for x, img in d0.images.items()}
    images[keep] = Polynomial()
    images[moved] = quotient * apply_derivation(d0, level.f)
    label = f"{side.value}[{format_poly(q)}]({d0.label})"
    return Derivation(images, label)
