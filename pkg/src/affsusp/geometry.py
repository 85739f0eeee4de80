"""Base geometries: what the transport algorithms assume about ``Y``.

A provider answers five questions about its variety ``Y`` and a function
``f`` on it: how to move any finite tuple of regular points to any other
(``interpolate``), which one-parameter flows span the tangent space
(``flexibility_lnds``), how to find a point with a prescribed ``f``-value
(``section``), what values ``f`` takes (``range_of``) and which connected
component a point lies in (``component_of``).

Two concrete providers exist.  :class:`TowerGeometry` covers affine space and
iterated suspensions over it whose functions each carry a *designated*
variable: one that appears in a single monomial, linearly, with a constant
coefficient, such that the remaining terms do not depend on it.  Such
functions take every rational value and their level sets have explicit
rational points.  :class:`MockGeometry` replaces ``Y`` by a table of opaque
tokens with declared ``f``-values; it exists to drive the bounded-range
branches, which no polynomial on affine space can reach.
"""

from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional

from . import linalg
from .config import EngineOptions, first_satisfying, generic_param, integer_candidates, rationals_in
from .derivation import AutomorphismScript, Derivation, FlowStep, apply_derivation, coordinate_field
from .errors import (
    ComponentMismatchError,
    MockUndefinedError,
    NoRationalPreimageError,
    OutOfRangeError,
    PreconditionError,
    UnsupportedFunctionError,
)
from .polyring import Polynomial, evaluate, format_rational, lagrange
from .tower import Side, SuspensionTower, TowerPoint, is_regular, lift_derivation


class RangeKind(enum.Enum):
    FULL_LINE = "FullLine"
    ZERO_INTERIOR = "ZeroInterior"
    UNBOUNDED_POSITIVE = "UnboundedPositive"
    UNBOUNDED_NEGATIVE = "UnboundedNegative"
    BOUNDED_POSITIVE = "BoundedPositive"
    BOUNDED_NEGATIVE = "BoundedNegative"
    BOUNDED_TOUCHING_ZERO = "BoundedTouchingZero"


@dataclass(frozen=True)
class RangeDescriptor:
    """Interior of ``f(Y^i)`` as an open interval ``(lo, hi)``.

    ``None`` bounds are infinite.  For the unbounded kinds the finite bound
    defaults to 0.  Ranges of the bounded-touching-zero kind are read as
    missing zero itself, so their points are hyperbolic.
    """

    kind: RangeKind
    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None

    def __post_init__(self):
        k, lo, hi = self.kind, self.lo, self.hi
        if k is RangeKind.UNBOUNDED_POSITIVE and lo is None:
            object.__setattr__(self, "lo", Fraction(0))
        if k is RangeKind.UNBOUNDED_NEGATIVE and hi is None:
            object.__setattr__(self, "hi", Fraction(0))
        lo, hi = self.lo, self.hi
        ok = {
            RangeKind.FULL_LINE: lo is None and hi is None,
            RangeKind.ZERO_INTERIOR: lo is not None and hi is not None and lo < 0 < hi,
            RangeKind.UNBOUNDED_POSITIVE: hi is None and lo is not None and lo >= 0,
            RangeKind.UNBOUNDED_NEGATIVE: lo is None and hi is not None and hi <= 0,
            RangeKind.BOUNDED_POSITIVE: lo is not None and hi is not None and 0 < lo < hi,
            RangeKind.BOUNDED_NEGATIVE: lo is not None and hi is not None and lo < hi < 0,
            RangeKind.BOUNDED_TOUCHING_ZERO:
                lo is not None and hi is not None and lo < hi and lo * hi == 0,
        }[k]
        if not ok:
            raise PreconditionError(f"inconsistent range {k.value}({lo}, {hi})")

    @classmethod
    def full_line(cls):
        return cls(RangeKind.FULL_LINE)

    @classmethod
    def bounded(cls, a, b):
        a, b = Fraction(a), Fraction(b)
        if a * b == 0:
            return cls(RangeKind.BOUNDED_TOUCHING_ZERO, a, b)
        if a > 0:
            return cls(RangeKind.BOUNDED_POSITIVE, a, b)
        if b < 0:
            return cls(RangeKind.BOUNDED_NEGATIVE, a, b)
        return cls(RangeKind.ZERO_INTERIOR, a, b)

    def contains(self, x: Fraction) -> bool:
        """Is ``x`` an interior value?"""
        return (self.lo is None or x > self.lo) and (self.hi is None or x < self.hi)

    @property
    def misses_zero(self) -> bool:
        return self.kind not in (RangeKind.FULL_LINE, RangeKind.ZERO_INTERIOR)

    @property
    def sign(self) -> int:
        """Sign of every value, for ranges missing zero."""
        if not self.misses_zero:
            return 0
        return 1 if (self.lo is not None and self.lo >= 0) else -1

    def candidates(self) -> Iterator[Fraction]:
        """Deterministic enumeration of interior values."""
        k = self.kind
        if k is RangeKind.FULL_LINE:
            return integer_candidates()
        if k is RangeKind.UNBOUNDED_POSITIVE:
            return (self.lo + n for n in itertools.count(1))
        if k is RangeKind.UNBOUNDED_NEGATIVE:
            return (self.hi - n for n in itertools.count(1))
        return rationals_in(self.lo, self.hi)

    def __str__(self):
        if self.kind is RangeKind.FULL_LINE:
            return "FullLine"
        lo = "-inf" if self.lo is None else format_rational(self.lo)
        hi = "inf" if self.hi is None else format_rational(self.hi)
        return f"{self.kind.value}({lo}, {hi})"


# -- towers over affine space ------------------------------------------------

def _value_sequence(nonzero: bool):
    # 0, 1, -1, 2, -2, ... (or without the 0)
    def at(i):
        if not nonzero:
            if i == 0:
                return Fraction(0)
            i -= 1
        k = i // 2 + 1
        return Fraction(k if i % 2 == 0 else -k)
    return at


def _shell_tuples(r: int) -> Iterator[tuple]:
    if r == 0:
        yield ()
        return
    s = 0
    while True:
        for idx in itertools.product(range(s + 1), repeat=r):
            if max(idx) == s:
                yield idx
        s += 1


@dataclass(frozen=True)
class _Chart:
    """Solving data for sections of ``f = a*w + rest``."""

    w: str
    a: Fraction
    rest: Polynomial
    free: dict          # level index -> free coordinate
    dependents: frozenset


def affine_interpolate(variables, sources, targets, options: EngineOptions) -> AutomorphismScript:
    """Shears of ``A^n`` sending ``sources[i]`` to ``targets[i]``.

    Both tuples are normalised to the configuration ``(0, i, 0, ..., 0)``;
    the result is the forward normalisation of the sources followed by the
    inverse normalisation of the targets.
    """
    variables = list(variables)
    if len(sources) != len(targets):
        raise PreconditionError("source and target tuples differ in length")
    if [tuple(p[v] for v in variables) for p in sources] == \
            [tuple(p[v] for v in variables) for p in targets]:
        return AutomorphismScript()
    if len(sources) == 1:
        steps = []
        for v in variables:
            delta = targets[0][v] - sources[0][v]
            if delta:
                steps.append(FlowStep(coordinate_field(variables, v), delta, "affine/translate"))
        return AutomorphismScript(steps)
    forward = _normalise(variables, sources, options)
    backward = _normalise(variables, targets, options)
    return forward + backward.inverse()


def _normalise(variables, points, options: EngineOptions) -> AutomorphismScript:
    x1, x2, rest = variables[0], variables[1], variables[1:]
    pts = [dict((v, p[v]) for v in variables) for p in points]
    if len({tuple(p[v] for v in variables) for p in pts}) != len(pts):
        raise PreconditionError("interpolation points must be pairwise distinct")
    steps = []
    zero = Polynomial()

    # stage 1: make the first coordinates pairwise distinct
    if len({p[x1] for p in pts}) != len(pts):
        def ell_values(lam):
            return [sum(p[v] * lam ** k for k, v in enumerate(rest)) for p in pts]

        pairs = list(itertools.combinations(range(len(pts)), 2))
        tails_differ = [(i, j) for i, j in pairs
                        if any(pts[i][v] != pts[j][v] for v in rest)]
        lam = generic_param(
            [lambda t, i=i, j=j: ell_values(t)[i] != ell_values(t)[j] for i, j in tails_differ],
            options.generic_cap)
        ells = ell_values(lam)
        c = generic_param(
            [lambda t, i=i, j=j: pts[i][x1] + t * ells[i] != pts[j][x1] + t * ells[j]
             for i, j in pairs],
            options.generic_cap)
        ell = Polynomial()
        for k, v in enumerate(rest):
            ell = ell + Polynomial.var(v).scale(lam ** k)
        d = Derivation({v: (ell if v == x1 else zero) for v in variables}, "affine/separate")
        steps.append(FlowStep(d, c, "affine/separate"))
        for p, e in zip(pts, ells):
            p[x1] = p[x1] + c * e

    # stage 2: the other coordinates go to (i, 0, ..., 0) as functions of x1
    xs = [p[x1] for p in pts]
    images = {}
    for j, v in enumerate(rest):
        goal = [Fraction(i) if j == 0 else Fraction(0) for i in range(len(pts))]
        images[v] = lagrange(x1, xs, [g - p[v] for g, p in zip(goal, pts)])
    if any(not h.is_zero() for h in images.values()):
        d = Derivation({v: images.get(v, zero) for v in variables}, "affine/spread")
        steps.append(FlowStep(d, 1, "affine/spread"))
        for i, p in enumerate(pts):
            p[x2] = Fraction(i)
            for v in rest[1:]:
                p[v] = Fraction(0)

    # stage 3: the first coordinate goes to 0 as a function of x2
    h = lagrange(x2, [p[x2] for p in pts], [-p[x1] for p in pts])
    if not h.is_zero():
        d = Derivation({v: (h if v == x1 else zero) for v in variables}, "affine/collapse")
        steps.append(FlowStep(d, 1, "affine/collapse"))
    return AutomorphismScript(steps)


class TowerGeometry:
    """Affine space (depth 0) or an iterated suspension over it."""

    def __init__(self, tower: SuspensionTower, designated: Optional[Mapping[int, str]] = None,
                 options: Optional[EngineOptions] = None):
        self.tower = tower
        self.options = options or EngineOptions()
        self.designated = dict(designated or {})
        self._candidates = None
        self._lower = None

    # basic data ------------------------------------------------------------

    @property
    def variables(self) -> list:
        return self.tower.variables

    @property
    def dim(self) -> int:
        return self.tower.dim

    def is_regular(self, point) -> bool:
        return is_regular(self.tower, point)

    def on_variety(self, point) -> bool:
        return all(evaluate(rel, point) == 0 for rel in self.tower.relations)

    def f_value(self, f: Polynomial, point) -> Fraction:
        return evaluate(f, point)

    def lower_geometry(self) -> "TowerGeometry":
        if self.tower.depth == 0:
            raise PreconditionError("affine space has no lower geometry")
        if self._lower is None:
            k = self.tower.depth - 1
            self._lower = TowerGeometry(
                self.tower.truncate(k),
                {i: w for i, w in self.designated.items() if i <= k},
                self.options)
        return self._lower

    def top_level(self):
        """Transit context of the highest level of this tower."""
        from .transit import LevelContext

        k = self.tower.depth
        lv = self.tower.level(k)
        return LevelContext(self.lower_geometry(), lv.f, lv.u_var, lv.v_var, k,
                            self.options, self.designated.get(k))

    # functions on the tower -------------------------------------------------

    def chart(self, f: Polynomial, designated: Optional[str] = None) -> _Chart:
        """Decompose ``f = a*w + rest`` for a usable designated variable ``w``."""
        order = [designated] if designated else self.variables
        for w in order:
            chart = self._try_chart(f, w)
            if chart is not None:
                return chart
        raise UnsupportedFunctionError(
            f"{f} has no designated variable usable on this tower"
            + (f" (requested {designated!r})" if designated else ""))

    def _try_chart(self, f: Polynomial, w: str) -> Optional[_Chart]:
        if w not in self.variables:
            return None
        lin = [(m, c) for m, c in f.terms.items() if w in dict(m)]
        if len(lin) != 1 or lin[0][0] != ((w, 1),):
            return None
        a = lin[0][1]
        rest = f - Polynomial.var(w).scale(a)
        free = {}
        deps = {w}
        for i, lv in enumerate(self.tower.levels, start=1):
            free[i] = w if w in (lv.u_var, lv.v_var) else lv.v_var
            dependent = lv.u_var if free[i] == lv.v_var else lv.v_var
            if free[i] in deps or lv.f.variables() & deps:
                deps.add(dependent)
        if rest.variables() & deps:
            return None
        return _Chart(w, a, rest, free, frozenset(deps))

    def designated_var(self, f: Polynomial, preferred: Optional[str] = None) -> str:
        return self.chart(f, preferred).w

    def range_of(self, f: Polynomial, comp=None, designated: Optional[str] = None) -> RangeDescriptor:
        self.chart(f, designated)
        return RangeDescriptor.full_line()

    def component_of(self, point):
        if self.tower.depth == 0:
            return f"A{self.tower.base_dim}"
        return self.top_level().component_of(point)

    def section(self, f: Polynomial, value: Fraction, comp=None, avoid=(),
                designated: Optional[str] = None) -> TowerPoint:
        """A rational point with ``f = value`` outside ``avoid``."""
        chart = self.chart(f, designated)
        value = Fraction(value)
        rng = self.range_of(f, comp, designated)
        if not rng.contains(value):
            raise OutOfRangeError(f"{format_rational(value)} outside {rng}")
        avoid = {tuple(p[v] for v in self.variables) for p in avoid}
        levels = self.tower.levels
        base_params = [v for v in self.tower.base_vars if v != chart.w]
        level_params = [(i, chart.free[i]) for i in range(1, len(levels) + 1)
                        if chart.free[i] != chart.w]
        zero_ok = _value_sequence(False)
        nonzero = _value_sequence(True)
        tries = 0
        for idx in _shell_tuples(len(base_params) + len(level_params)):
            tries += 1
            if tries > self.options.generic_cap:
                break
            vals = {}
            for v, i in zip(base_params, idx):
                vals[v] = zero_ok(i)
            for (_, v), i in zip(level_params, idx[len(base_params):]):
                vals[v] = nonzero(i)
            self._fill(vals, chart, skip_dependents=True)
            w_val = (value - evaluate(chart.rest, vals)) / chart.a
            if w_val == 0 and chart.w not in self.tower.base_vars:
                continue
            vals[chart.w] = w_val
            self._fill(vals, chart, skip_dependents=False)
            key = tuple(vals[v] for v in self.variables)
            if key in avoid:
                continue
            return TowerPoint({v: vals[v] for v in self.variables})
        if value == 0 and chart.rest.is_zero() and chart.w not in self.tower.base_vars:
            return self._zero_section(chart, avoid)
        raise NoRationalPreimageError(
            f"no rational point with f = {format_rational(value)} found in {self.options.generic_cap} tries")

    def _zero_section(self, chart: _Chart, avoid) -> TowerPoint:
        """``f = a*w`` with ``w`` a coordinate of level ``i``: points with
        ``w = 0`` sit over the zero set of ``f_i`` with the partner free."""
        i = next(k for k, lv in enumerate(self.tower.levels, start=1)
                 if chart.w in (lv.u_var, lv.v_var))
        lv = self.tower.level(i)
        partner = lv.v_var if chart.w == lv.u_var else lv.u_var
        lower = TowerGeometry(self.tower.truncate(i - 1),
                              {k: w for k, w in self.designated.items() if k < i}, self.options)
        nonzero = _value_sequence(True)
        used = []
        for _ in range(self.options.generic_cap):
            r = lower.section(lv.f, Fraction(0), avoid=used, designated=self.designated.get(i))
            used.append(r)
            for j in range(8):
                vals = dict(r)
                vals[chart.w] = Fraction(0)
                vals[partner] = nonzero(j)
                for k in range(i + 1, self.tower.depth + 1):
                    vals[chart.free[k]] = Fraction(1)
                self._fill(vals, chart, skip_dependents=False)
                key = tuple(vals[v] for v in self.variables)
                if key not in avoid:
                    return TowerPoint({v: vals[v] for v in self.variables})
        raise NoRationalPreimageError("no rational point with f = 0 found")

    def _fill(self, vals, chart: _Chart, skip_dependents: bool):
        for i, lv in enumerate(self.tower.levels, start=1):
            fv = chart.free[i]
            dv = lv.u_var if fv == lv.v_var else lv.v_var
            if dv in vals:
                continue
            if skip_dependents and dv in chart.dependents:
                continue
            vals[dv] = evaluate(lv.f, vals) / vals[fv]

    # transitivity and flexibility ------------------------------------------

    def interpolate(self, sources, targets) -> AutomorphismScript:
        if len(sources) != len(targets):
            raise PreconditionError("source and target tuples differ in length")
        if [tuple(p[v] for v in self.variables) for p in sources] == \
                [tuple(p[v] for v in self.variables) for p in targets]:
            return AutomorphismScript()
        if self.tower.depth == 0:
            return affine_interpolate(self.variables, sources, targets, self.options)
        from .transit import transport

        return transport(self.top_level(), sources, targets)

    def lnd_candidates(self) -> list:
        """Coordinate fields lifted through every level with ``q = v`` and ``q = u``."""
        if self._candidates is None:
            base = list(self.tower.base_vars)
            cands = [coordinate_field(base, x) for x in base]
            if self.tower.levels:
                cands += self._kernel_fields(self.tower.level(1).f)
            for lv in self.tower.levels:
                nxt, kernel = [], []
                for d in cands:
                    nxt.append(lift_derivation(d, Polynomial.var(lv.v_var), lv, Side.V))
                    nxt.append(lift_derivation(d, Polynomial.var(lv.u_var), lv, Side.U))
                    if apply_derivation(d, lv.f).is_zero():
                        # d kills f: it extends with u and v untouched
                        images = dict(d.images)
                        images[lv.u_var] = images[lv.v_var] = Polynomial()
                        kernel.append(Derivation(images, f"1({d.label})"))
                cands = nxt + kernel
            self._candidates = cands
        return self._candidates

    def _kernel_fields(self, f: Polynomial) -> list:
        """Triangular fields ``d/dx - (d rest/dx) / a * d/dw`` killing ``f = a*w + rest``."""
        base = list(self.tower.base_vars)
        try:
            chart = self.chart(f, self.designated.get(1))
        except UnsupportedFunctionError:
            return []
        if chart.w not in base or not chart.rest.variables() <= set(base):
            return []
        out = []
        for x in base:
            if x == chart.w or x not in chart.rest.variables():
                continue
            images = {y: Polynomial() for y in base}
            images[x] = Polynomial.const(1)
            images[chart.w] = chart.rest.partial(x).scale(-1 / chart.a)
            out.append(Derivation(images, f"d/d{x}|{chart.w}"))
        return out

    def flexibility_lnds(self, point) -> list:
        """Locally nilpotent derivations whose values at ``point`` span its
        tangent space (greedy choice among :meth:`lnd_candidates`)."""
        chosen, rows = [], []
        for d in self.lnd_candidates():
            row = [evaluate(d.images[x], point) for x in self.variables]
            if linalg.rank(rows + [row]) > len(rows):
                chosen.append(d)
                rows.append(row)
                if len(rows) == self.dim:
                    break
        return chosen


def AffineSpace(variables, options: Optional[EngineOptions] = None) -> TowerGeometry:
    return TowerGeometry(SuspensionTower.affine(variables), options=options)


# -- mock geometry ---------------------------------------------------------------

@dataclass(frozen=True)
class MockMove:
    """Token permutation standing in for an automorphism of the mock base."""

    mapping: tuple      # sorted (token, token) pairs, a bijection on its support
    geometry: "MockGeometry"
    time: int = 1
    stage: str = ""

    def permutation(self) -> dict:
        m = dict(self.mapping)
        return m if self.time > 0 else {b: a for a, b in m.items()}

    def act(self, point) -> dict:
        out = dict(point)
        var = self.geometry.var
        tok = int(point[var])
        out[var] = Fraction(self.permutation().get(tok, tok))
        return out

    def inverse(self) -> "MockMove":
        return MockMove(self.mapping, self.geometry, -self.time, self.stage)


@dataclass(frozen=True)
class MockLift:
    """A mock move lifted to the suspension with multiplier ``q``.

    Only points where ``q`` is 0 (fixed) or 1 (moved like the base) have a
    defined image; anything else raises :class:`MockUndefinedError`.
    """

    move: MockMove
    q: Polynomial
    side: Side
    u_var: str
    v_var: str
    stage: str = ""

    @property
    def time(self) -> int:
        return self.move.time

    def act(self, point) -> dict:
        keep, moved = (self.v_var, self.u_var) if self.side is Side.V else (self.u_var, self.v_var)
        c = point[keep]
        s = evaluate(self.q, {keep: c})
        if s == 0:
            return dict(point)
        if s != 1:
            raise MockUndefinedError(f"mock flow undefined at {keep} = {format_rational(c)}")
        out = self.move.act(point)
        out[moved] = self.move.geometry.token_value(int(out[self.move.geometry.var])) / c
        return out

    def inverse(self) -> "MockLift":
        return MockLift(self.move.inverse(), self.q, self.side, self.u_var, self.v_var, self.stage)


class MockGeometry:
    """Opaque base points (tokens) with declared ``f``-values and components."""

    def __init__(self, components: Mapping[str, RangeDescriptor],
                 tokens: Mapping[int, tuple], dim: int = 2, var: str = "t"):
        if dim < 2:
            raise PreconditionError("mock dimension must be at least 2")
        self.components = dict(components)
        self.tokens = {}
        self.dim = dim
        self.var = var
        self._lock = threading.Lock()
        for tok, (value, comp) in tokens.items():
            self._register(int(tok), Fraction(value), comp)

    def _register(self, tok: int, value: Fraction, comp: str):
        if comp not in self.components:
            raise PreconditionError(f"token {tok}: unknown component {comp!r}")
        if not self.components[comp].contains(value) or value == 0:
            raise OutOfRangeError(
                f"token {tok}: value {format_rational(value)} not an interior nonzero value of {comp}")
        self.tokens[tok] = (value, comp)

    @property
    def variables(self) -> list:
        return [self.var]

    def token_value(self, tok: int) -> Fraction:
        return self.tokens[tok][0]

    def is_regular(self, point) -> bool:
        return int(point[self.var]) in self.tokens

    def on_variety(self, point) -> bool:
        return int(point[self.var]) in self.tokens

    def f_value(self, f, point) -> Fraction:
        return self.token_value(int(point[self.var]))

    def component_of(self, point):
        return self.tokens[int(point[self.var])][1]

    def range_of(self, f=None, comp=None, designated=None) -> RangeDescriptor:
        return self.components[comp]

    def designated_var(self, f, preferred=None):
        return self.var

    def section(self, f, value, comp=None, avoid=(), designated=None) -> TowerPoint:
        value = Fraction(value)
        rng = self.components[comp]
        if not rng.contains(value) or value == 0:
            raise OutOfRangeError(f"{format_rational(value)} outside {comp}: {rng}")
        banned = {int(p[self.var]) for p in avoid}
        with self._lock:
            for tok in sorted(self.tokens):
                if self.tokens[tok] == (value, comp) and tok not in banned:
                    return TowerPoint({self.var: tok})
            tok = max(self.tokens, default=0) + 1
            self.tokens[tok] = (value, comp)
        return TowerPoint({self.var: tok})

    def interpolate(self, sources, targets) -> AutomorphismScript:
        if len(sources) != len(targets):
            raise PreconditionError("source and target tuples differ in length")
        src = [int(p[self.var]) for p in sources]
        tgt = [int(p[self.var]) for p in targets]
        if len(set(src)) != len(src) or len(set(tgt)) != len(tgt):
            raise PreconditionError("interpolation points must be pairwise distinct")
        for s, t in zip(src, tgt):
            if self.tokens[s][1] != self.tokens[t][1]:
                raise ComponentMismatchError(f"tokens {s} and {t} lie in different components")
        perm = {s: t for s, t in zip(src, tgt) if s != t}
        if not perm:
            return AutomorphismScript()
        # close the partial bijection into a permutation, within components
        loose_t = sorted(t for t in perm.values() if t not in perm)
        loose_s = sorted(s for s in perm if s not in perm.values())
        for comp in sorted({self.tokens[t][1] for t in loose_t}):
            ts = [t for t in loose_t if self.tokens[t][1] == comp]
            ss = [s for s in loose_s if self.tokens[s][1] == comp]
            perm.update(zip(ts, ss))
        return AutomorphismScript((MockMove(tuple(sorted(perm.items())), self, 1, "mock/interpolate"),))

    def lnd_candidates(self) -> list:
        return []

    def _kernel_fields(self, f: Polynomial) -> list:
        """Triangular fields ``d/dx - (d rest/dx) / a * d/dw`` killing ``f = a*w + rest``."""
        base = list(self.tower.base_vars)
        try:
            chart = self.chart(f, self.designated.get(1))
        except UnsupportedFunctionError:
            return []
        if chart.w not in base or not chart.rest.variables() <= set(base):
            return []
        out = []
        for x in base:
            if x == chart.w or x not in chart.rest.variables():
                continue
            images = {y: Polynomial() for y in base}
            images[x] = Polynomial.const(1)
            images[chart.w] = chart.rest.partial(x).scale(-1 / chart.a)
            out.append(Derivation(images, f"d/d{x}|{chart.w}"))
        return out

    def flexibility_lnds(self, point) -> list:
        return []


def lift_step(step, q: Polynomial, level, side: Side, stage: str):
    """Lift one base step to a suspension level (polynomial or mock)."""
    if isinstance(step, FlowStep):
        return FlowStep(lift_derivation(step.derivation, q, level, side), step.time, stage)
    if isinstance(step, MockMove):
        return MockLift(step, q, side, level.u_var, level.v_var, stage)
    raise TypeError(f"cannot lift {type(step).__name__}")
