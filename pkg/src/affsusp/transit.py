"""Transport of point tuples on a suspension level.

Everything here works on one level of a tower: a base geometry ``Y`` with a
function ``f`` and the suspension ``X = {u v = f}`` above it.  The moves are
lifts of base automorphisms through multipliers ``q(v)`` (side V, which
preserves every level set ``{v = c}``) or ``q(u)`` (side U).  A multiplier
vanishing at ``c`` fixes the level set ``{v = c}`` pointwise, and one equal
to 1 at ``c0`` makes the lifted flow act on ``{v = c0}`` exactly like the
base flow.  Those two facts drive every construction below.

Scripts apply their leftmost step first.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import linalg
from .config import (
    ChoiceAlphaConfig,
    EngineOptions,
    first_satisfying,
    generic_param,
    rationals_in,
    unit_fractions,
)
from .derivation import AutomorphismScript, Derivation, FlowStep, apply_derivation
from .errors import (
    ComponentMismatchError,
    DegenerateInputError,
    EngineError,
    NoFlexibleDirectionError,
    OffVarietyError,
    PreconditionError,
    SuspError,
    UnsupportedFunctionError,
)
from .geometry import MockGeometry, RangeDescriptor, RangeKind, TowerGeometry, lift_step
from .polyring import Polynomial, evaluate, format_rational, from_roots
from .tower import (Side, SuspensionLevel, SuspensionTower, TowerPoint, check_point, is_regular,
                    lift_derivation)

__all__ = [
    "LevelContext", "AlphaChoice", "FlexCertificate", "lift_lnd", "stab_multiplier",
    "lift_base_script", "level_transit", "avoid_zero", "distinct_coords", "choose_alpha",
    "transport_component", "transport", "flexibility_certificate", "generic_param",
    "apply_script", "plan_transport", "TransportPlan",
]


@dataclass
class LevelContext:
    """One suspension level: base geometry, function, variable names."""

    geometry: object
    f: Optional[Polynomial]
    u: str
    v: str
    index: int = 1
    options: EngineOptions = field(default_factory=EngineOptions)
    designated: Optional[str] = None

    def __post_init__(self):
        self.level = SuspensionLevel(self.u, self.v, self.f)
        self._tower = None

    @classmethod
    def for_tower(cls, tower: SuspensionTower, designated=None, options=None) -> "LevelContext":
        return TowerGeometry(tower, designated, options).top_level()

    @property
    def variables(self) -> list:
        return self.geometry.variables + [self.u, self.v]

    @property
    def tower(self) -> Optional[SuspensionTower]:
        if self._tower is None and isinstance(self.geometry, TowerGeometry):
            g = self.geometry.tower
            self._tower = SuspensionTower(g.base_vars, g.levels + (self.level,))
        return self._tower

    def var(self, side: Side) -> str:
        return self.v if side is Side.V else self.u

    def coord(self, p, side: Side) -> Fraction:
        return p[self.var(side)]

    def lower(self, p) -> TowerPoint:
        return TowerPoint({x: p[x] for x in self.geometry.variables})

    def f_at(self, p) -> Fraction:
        return self.geometry.f_value(self.f, self.lower(p))

    def point(self, lower, u, v) -> TowerPoint:
        coords = {x: lower[x] for x in self.geometry.variables}
        coords[self.u] = u
        coords[self.v] = v
        return TowerPoint(coords)

    def level_point(self, lower, side: Side, c: Fraction) -> TowerPoint:
        """The point over ``lower`` on the level set ``{side = c}``, ``c != 0``."""
        other = self.f_at(lower) / c
        return self.point(lower, other, c) if side is Side.V else self.point(lower, c, other)

    def on_variety(self, p) -> bool:
        r = self.lower(p)
        return self.geometry.on_variety(r) and p[self.u] * p[self.v] == self.f_at(r)

    def is_regular(self, p) -> bool:
        if self.tower is not None:
            return is_regular(self.tower, p)
        return self.geometry.is_regular(self.lower(p))

    @staticmethod
    def hyperbolic(p, ctx) -> bool:
        return p[ctx.u] != 0 and p[ctx.v] != 0

    def is_hyperbolic(self, p) -> bool:
        return p[self.u] != 0 and p[self.v] != 0

    def base_component(self, p):
        return self.geometry.component_of(self.lower(p))

    def component_of(self, p):
        base = self.base_component(p)
        rng = self.geometry.range_of(self.f, base, self.designated)
        if rng.misses_zero:
            return (base, 1 if p[self.u] > 0 else -1)
        return (base,)

    def component_labels(self) -> list:
        """Every component label of this level's regular locus."""
        geo = self.geometry
        if isinstance(geo, MockGeometry):
            bases = list(geo.components)
        elif geo.tower.depth == 0:
            bases = [geo.component_of(None)]
        else:
            bases = geo.top_level().component_labels()
        out = []
        for b in bases:
            if geo.range_of(self.f, b, self.designated).misses_zero:
                out += [(b, 1), (b, -1)]
            else:
                out.append((b,))
        return out

    def range(self, comp) -> RangeDescriptor:
        return self.geometry.range_of(self.f, comp[0], self.designated)

    def section(self, value, comp, avoid=()) -> TowerPoint:
        return self.geometry.section(self.f, value, comp[0], avoid, self.designated)


def apply_script(script: AutomorphismScript, points: Iterable, cap: Optional[int] = None) -> list:
    out = []
    for p in points:
        q = dict(p)
        for step in script.steps:
            q = step.act(q, cap) if (cap is not None and isinstance(step, FlowStep)) else step.act(q)
        out.append(TowerPoint(q))
    return out


# -- lifts -----------------------------------------------------------------------

def lift_lnd(d0: Derivation, q: Polynomial, ctx: LevelContext, side: Side) -> Derivation:
    """Lift a base derivation through the multiplier ``q`` (in v for side V,
    in u for side U); ``q(0)`` must vanish."""
    return lift_derivation(d0, q, ctx.level, side)


def stab_multiplier(c0, fixed: Sequence = (), var: str = "z") -> Polynomial:
    """``alpha * z * prod (z - c_s)`` normalised by ``q(c0) = 1``."""
    c0 = Fraction(c0)
    fixed = [Fraction(c) for c in fixed]
    if c0 == 0:
        raise DegenerateInputError("normalisation point must be nonzero")
    if c0 in fixed:
        raise DegenerateInputError(f"{format_rational(c0)} is both moved and fixed")
    if 0 in fixed or len(set(fixed)) != len(fixed):
        raise DegenerateInputError("fixed values must be distinct and nonzero")
    roots = [Fraction(0)] + fixed
    scale = Fraction(1)
    for r in roots:
        scale *= c0 - r
    return from_roots(var, roots, 1 / scale)


def lift_base_script(s: AutomorphismScript, q: Polynomial, ctx: LevelContext, side: Side,
                     stage: str = "lift") -> AutomorphismScript:
    return AutomorphismScript(tuple(lift_step(step, q, ctx.level, side, stage) for step in s.steps))


def _fixed_values(values: Iterable, exclude: Fraction) -> list:
    out = []
    for c in values:
        c = Fraction(c)
        if c != 0 and c != exclude and c not in out:
            out.append(c)
    return sorted(out)


def level_transit(ctx: LevelContext, side: Side, c0, fixed: Sequence, sources: Sequence,
                  targets: Sequence, stage: str = "level_transit") -> AutomorphismScript:
    """Move ``sources`` to ``targets`` inside the level set ``{side = c0}``
    while fixing the level sets ``{side = c}``, ``c`` in ``fixed``, pointwise."""
    c0 = Fraction(c0)
    if c0 == 0:
        raise PreconditionError("level transit needs a nonzero level")
    if len(sources) != len(targets):
        raise DegenerateInputError("source and target tuples differ in length")
    for p in list(sources) + list(targets):
        if ctx.coord(p, side) != c0:
            raise PreconditionError(f"point {p} is not on the level {side.value} = {format_rational(c0)}")
    if list(map(dict, sources)) == list(map(dict, targets)):
        return AutomorphismScript()
    base = ctx.geometry.interpolate([ctx.lower(p) for p in sources],
                                    [ctx.lower(p) for p in targets])
    q = stab_multiplier(c0, _fixed_values(fixed, c0), ctx.var(side))
    return lift_base_script(base, q, ctx, side, stage)


# -- hyperbolisation ---------------------------------------------------------------

def _update(script, pts, known: dict, ctx: LevelContext):
    """Images of ``pts``: ``known`` gives some by index; the rest are either
    on a fixed level (unchanged) or computed by running the script."""
    out = []
    for i, p in enumerate(pts):
        if i in known:
            out.append(known[i])
        else:
            out.append(apply_script(script, [p], ctx.options.nilpotency_cap)[0])
    return out


def _avoid_zero(ctx: LevelContext, pts: list, avoid_u=(), avoid_v=(), stage="avoid_zero"):
    pts = list(pts)
    script = AutomorphismScript()
    avoid = {Side.U: set(map(Fraction, avoid_u)), Side.V: set(map(Fraction, avoid_v))}
    while True:
        idx = next((i for i, p in enumerate(pts) if not ctx.is_hyperbolic(p)), None)
        if idx is None:
            return script, pts
        p = pts[idx]
        comp = ctx.component_of(p)
        rng = ctx.range(comp)
        if not rng.contains(Fraction(0)):
            raise PreconditionError(
                f"non-hyperbolic point {p} on a component whose range {rng} lacks 0 in its interior")
        if p[ctx.u] == 0 and p[ctx.v] == 0:
            # both coordinates vanish: push u off zero along a V-side lift
            r = ctx.lower(p)
            d0 = next((d for d in ctx.geometry.lnd_candidates()
                       if evaluate(apply_derivation(d, ctx.f), r) != 0), None)
            if d0 is None:
                raise NoFlexibleDirectionError(f"every candidate derivation kills df at {r}")
            keep = _fixed_values([q[ctx.v] for q in pts] + list(avoid[Side.V]), Fraction(0))
            q = from_roots(ctx.v, [Fraction(0)] + keep)
            d = lift_lnd(d0, q, ctx, Side.V)

            def moved_u(t):
                return FlowStep(d, t).act(dict(p), ctx.options.nilpotency_cap)[ctx.u]

            t0 = generic_param([lambda t: moved_u(t) != 0,
                                lambda t: moved_u(t) not in avoid[Side.U]],
                               ctx.options.generic_cap)
            step = AutomorphismScript((FlowStep(d, t0, f"{stage}/case2"),))
            script = script + step
            pts = _update(step, pts, {i: q for i, q in enumerate(pts)
                                      if q[ctx.v] != 0}, ctx)
            continue
        # one coordinate vanishes: move the point inside the level of the other
        side = Side.V if p[ctx.u] == 0 else Side.U
        c0 = ctx.coord(p, side)
        free = side.other
        on_level = [i for i, q in enumerate(pts) if ctx.coord(q, side) == c0]
        w = first_satisfying(
            rng.candidates(),
            [lambda w: w != 0, lambda w: w / c0 not in avoid[free]],
            ctx.options.generic_cap)
        r_new = ctx.section(w, comp, avoid=[ctx.lower(pts[i]) for i in on_level])
        target = ctx.level_point(r_new, side, c0)
        fixed = [ctx.coord(q, side) for i, q in enumerate(pts) if i not in on_level]
        fixed += list(avoid[side])
        tgts = [target if i == idx else pts[i] for i in on_level]
        step = level_transit(ctx, side, c0, fixed, [pts[i] for i in on_level], tgts,
                             f"{stage}/case1-{side.value}")
        script = script + step
        known = {i: t for i, t in zip(on_level, tgts)}
        known.update({i: q for i, q in enumerate(pts)
                      if i not in known and ctx.coord(q, side) != 0})
        pts = _update(step, pts, known, ctx)


def avoid_zero(ctx: LevelContext, points: Sequence, avoid_u=(), avoid_v=()) -> AutomorphismScript:
    """A script after which every point has ``u != 0`` and ``v != 0``."""
    return _avoid_zero(ctx, list(points), avoid_u, avoid_v)[0]


# -- separation of coordinates -----------------------------------------------------

def _distinct_coords(ctx: LevelContext, pts: list, stage="distinct_coords"):
    script, pts = _avoid_zero(ctx, pts, stage=f"{stage}/avoid_zero")
    # side V pass separates u-values inside v-levels, side U pass the v-values
    for side in (Side.V, Side.U):
        sep = side.other
        seen, marked = set(), []
        for i, p in enumerate(pts):
            val = ctx.coord(p, sep)
            if val in seen:
                marked.append(i)
            else:
                seen.add(val)
        if not marked:
            continue
        forbidden = {ctx.coord(p, sep) for p in pts}
        levels = []
        for i in marked:
            c = ctx.coord(pts[i], side)
            if c not in levels:
                levels.append(c)
        for c in levels:
            group = [i for i, p in enumerate(pts) if ctx.coord(p, side) == c]
            chosen = [ctx.lower(pts[i]) for i in group]
            targets = []
            for i in group:
                if i not in marked:
                    targets.append(pts[i])
                    continue
                comp = ctx.component_of(pts[i])
                w = first_satisfying(
                    ctx.range(comp).candidates(),
                    [lambda w: w != 0, lambda w, c=c: w / c not in forbidden],
                    ctx.options.generic_cap)
                r_new = ctx.section(w, comp, avoid=chosen)
                chosen.append(r_new)
                forbidden.add(w / c)
                targets.append(ctx.level_point(r_new, side, c))
            fixed = [ctx.coord(p, side) for i, p in enumerate(pts) if i not in group]
            script = script + level_transit(ctx, side, c, fixed, [pts[i] for i in group],
                                            targets, f"{stage}/{side.value}")
            for i, t in zip(group, targets):
                pts[i] = t
    return script, pts


def distinct_coords(ctx: LevelContext, points: Sequence) -> AutomorphismScript:
    """A script after which the points have pairwise distinct u-values and
    pairwise distinct v-values (and are hyperbolic)."""
    return _distinct_coords(ctx, list(points))[0]


# -- choice of alpha -------------------------------------------------------------

@dataclass
class AlphaChoice:
    script: AutomorphismScript
    alpha: Fraction
    points: list
    trace: list = field(default_factory=list)


def _sign(x) -> int:
    return 1 if x > 0 else -1


def _choose_alpha(ctx: LevelContext, pts: list, members: list, comp, avoid_u, avoid_v,
                  cfg: ChoiceAlphaConfig, forbidden=(), stage="choose_alpha") -> AlphaChoice:
    pts = list(pts)
    forbidden = set(forbidden)
    avoid_u = set(map(Fraction, avoid_u))
    avoid_v = set(map(Fraction, avoid_v))
    rng = ctx.range(comp)
    cap = ctx.options.generic_cap
    script = AutomorphismScript()
    trace = []
    kind = rng.kind
    for i in members:
        if ctx.component_of(pts[i]) != comp:
            raise ComponentMismatchError(f"point {pts[i]} is not in component {comp}")
    us = [pts[i][ctx.u] for i in members]
    vs = [pts[i][ctx.v] for i in members]
    if len(set(us)) != len(us) or len(set(vs)) != len(vs):
        raise PreconditionError("choose_alpha needs pairwise distinct u- and v-values")
    if (set(us) & avoid_u) or (set(vs) & avoid_v):
        raise PreconditionError("avoid sets must be disjoint from the points' coordinates")

    def inside(alpha):
        return all(rng.contains(alpha * pts[i][ctx.v]) for i in members)

    def fresh(alpha):
        return alpha != 0 and alpha not in forbidden

    if kind is RangeKind.FULL_LINE:
        alpha = generic_param([fresh], cap)
    elif kind is RangeKind.ZERO_INTERIOR:
        alpha = first_satisfying((Fraction(1, k) for k in range(1, cap + 1)), [fresh, inside], cap)
    elif kind in (RangeKind.UNBOUNDED_POSITIVE, RangeKind.UNBOUNDED_NEGATIVE):
        s = rng.sign * _sign(vs[0])
        alpha = first_satisfying((Fraction(s * k) for k in range(1, cap + 1)), [fresh, inside], cap)
    elif kind is RangeKind.BOUNDED_TOUCHING_ZERO:
        script, pts = _avoid_zero(ctx, pts, avoid_u, avoid_v, f"{stage}/avoid_zero")
        bound = rng.hi if rng.hi != 0 else rng.lo
        vmax = max(abs(pts[i][ctx.v]) for i in members)
        s = rng.sign * _sign(pts[members[0]][ctx.v])
        alpha = first_satisfying((s * abs(bound) / vmax * t for t in unit_fractions()),
                                 [fresh, inside], cap)
    elif kind in (RangeKind.BOUNDED_POSITIVE, RangeKind.BOUNDED_NEGATIVE):
        sf = rng.sign
        lo, hi = sorted((abs(rng.lo), abs(rng.hi)))
        sv = _sign(vs[0])
        eps = cfg.epsilon_for(lo, hi)

        def spread():
            mags = [abs(pts[i][ctx.v]) for i in members]
            return max(mags), min(mags)

        iteration = 0
        while True:
            vmax, vmin = spread()
            if vmax * lo < hi * vmin:       # vmax / vmin < hi / lo
                break
            iteration += 1
            if iteration > cfg.max_iterations:
                raise EngineError("contraction loop exceeded its iteration budget")
            k = next(i for i in members if abs(pts[i][ctx.v]) == vmax)
            p = pts[k]
            others = [i for i in members if i != k]
            other_u = {pts[i][ctx.u] for i in others} | avoid_u
            other_v = {pts[i][ctx.v] for i in others} | avoid_v
            v_old = p[ctx.v]
            # push f towards the far end of the range inside {v = v_old}
            eps1 = first_satisfying(rationals_in(Fraction(0), eps),
                                    [lambda e: sf * (hi - e) / v_old not in other_u], cap)
            w1 = sf * (hi - eps1)
            r1 = ctx.section(w1, comp, avoid=())
            p1 = ctx.point(r1, w1 / v_old, v_old)
            step1 = level_transit(ctx, Side.V, v_old, list(other_v), [p], [p1],
                                  f"{stage}/contract-V")
            u_new = p1[ctx.u]
            # then towards the near end inside {u = u_new}
            eps2 = first_satisfying(rationals_in(Fraction(0), eps),
                                    [lambda e: sf * (lo + e) / u_new not in other_v], cap)
            w2 = sf * (lo + eps2)
            r2 = ctx.section(w2, comp, avoid=())
            p2 = ctx.point(r2, u_new, w2 / u_new)
            step2 = level_transit(ctx, Side.U, u_new, list(other_u), [p1], [p2],
                                  f"{stage}/contract-U")
            script = script + step1 + step2
            pts[k] = p2
            trace.append({
                "iteration": iteration,
                "v_before": v_old,
                "v_after": p2[ctx.v],
                "factor": abs(p2[ctx.v] / v_old),
                "epsilon": eps,
                "epsilon1": eps1,
                "epsilon2": eps2,
                "bound": (lo + eps) / (hi - eps),
            })
        vmax, vmin = spread()
        alpha = first_satisfying((sf * sv * m for m in rationals_in(lo / vmin, hi / vmax)),
                                 [fresh, inside], cap)
    else:  # pragma: no cover - enum is closed
        raise UnsupportedFunctionError(f"unsupported range {rng}")
    if not inside(alpha):
        raise EngineError(f"alpha {alpha} fails the interior check")
    return AlphaChoice(script, alpha, pts, trace)


def choose_alpha(ctx: LevelContext, points: Sequence, comp=None, avoid_u=(), avoid_v=(),
                 cfg: Optional[ChoiceAlphaConfig] = None, forbidden=()) -> AlphaChoice:
    """Find ``g`` and ``alpha != 0`` with ``alpha * v(g P)`` interior to the
    range of ``f`` for every point; ``g`` fixes the levels in the avoid sets."""
    pts = list(points)
    if comp is None:
        comp = ctx.component_of(pts[0])
    cfg = cfg or ctx.options.alpha
    return _choose_alpha(ctx, pts, list(range(len(pts))), comp, avoid_u, avoid_v, cfg, forbidden)


# -- transport -------------------------------------------------------------------

@contextmanager
def _stage(name: str):
    try:
        yield
    except SuspError as err:
        if err.stage is None:
            err.stage = name
        raise


def _check_tuples(ctx: LevelContext, sources, targets):
    if len(sources) != len(targets):
        raise DegenerateInputError("source and target tuples differ in length")
    for label, pts in (("source", sources), ("target", targets)):
        if len(set(map(TowerPoint, pts))) != len(pts):
            raise DegenerateInputError(f"{label} points must be pairwise distinct")
        for p in pts:
            if ctx.tower is not None:
                check_point(ctx.tower, p)       # names the failing level
            if not ctx.on_variety(p):
                raise OffVarietyError(f"{label} point {p} is off the variety", ctx.index)
            if not ctx.is_regular(p):
                raise PreconditionError(f"{label} point {p} is singular")


@dataclass
class TransportPlan:
    """A transport script with the choices that produced it."""

    script: AutomorphismScript
    alphas: dict = field(default_factory=dict)       # component label -> alpha
    head_length: int = 0                              # steps before the U-interpolation
    alpha_traces: dict = field(default_factory=dict)  # component label -> contraction trace


def _transport(ctx: LevelContext, sources, targets, single: bool) -> TransportPlan:
    sources = [TowerPoint({x: p[x] for x in ctx.variables}) for p in sources]
    targets = [TowerPoint({x: p[x] for x in ctx.variables}) for p in targets]
    _check_tuples(ctx, sources, targets)
    if sources == targets:
        return TransportPlan(AutomorphismScript())
    src_comp = [ctx.component_of(p) for p in sources]
    tgt_comp = [ctx.component_of(p) for p in targets]
    if Counter(src_comp) != Counter(tgt_comp):
        raise ComponentMismatchError("sources and targets are spread differently over components")
    if single and len(set(src_comp)) > 1:
        raise ComponentMismatchError("transport_component needs all points in one component")

    pool, index = [], {}
    for p in sources + targets:
        if p not in index:
            index[p] = len(pool)
            pool.append(p)
    src_idx = [index[p] for p in sources]
    tgt_idx = [index[p] for p in targets]
    pool_comp = [ctx.component_of(p) for p in pool]
    comps = list(dict.fromkeys(pool_comp))

    with _stage("distinct_coords"):
        head, pool = _distinct_coords(ctx, pool, "transport/distinct_coords")

    alphas, traces = {}, {}
    for comp in comps:
        members = [i for i, c in enumerate(pool_comp) if c == comp]
        others = [i for i, c in enumerate(pool_comp) if c != comp]
        with _stage("choose_alpha"):
            choice = _choose_alpha(ctx, pool, members, comp,
                                   {pool[i][ctx.u] for i in others},
                                   {pool[i][ctx.v] for i in others},
                                   ctx.options.alpha, set(alphas.values()),
                                   "transport/choose_alpha")
        head = head + choice.script
        pool = choice.points
        alphas[comp] = choice.alpha
        traces[comp] = choice.trace

    # one mover per point, each fixing every other v-level
    for i, p in enumerate(pool):
        alpha = alphas[pool_comp[i]]
        if p[ctx.u] == alpha:
            continue
        c = p[ctx.v]
        with _stage("mover"):
            r_new = ctx.section(alpha * c, pool_comp[i])
            target = ctx.point(r_new, alpha, c)
            fixed = [q[ctx.v] for j, q in enumerate(pool) if j != i]
            head = head + level_transit(ctx, Side.V, c, fixed, [p], [target], "transport/mover")
        pool[i] = target

    middle = AutomorphismScript()
    for comp in comps:
        ks = [k for k in range(len(sources)) if src_comp[k] == comp]
        src = [pool[src_idx[k]] for k in ks]
        tgt = [pool[tgt_idx[k]] for k in ks]
        fixed = [a for c, a in alphas.items() if c != comp]
        with _stage("interpolate-U"):
            middle = middle + level_transit(ctx, Side.U, alphas[comp], fixed, src, tgt,
                                            "transport/interpolate-U")
    return TransportPlan(head + middle + head.inverse(), alphas, len(head), traces)


def transport_component(ctx: LevelContext, sources: Sequence, targets: Sequence) -> AutomorphismScript:
    """Map ``sources[i]`` to ``targets[i]`` for points of one component."""
    return _transport(ctx, sources, targets, single=True).script


def transport(ctx: LevelContext, sources: Sequence, targets: Sequence) -> AutomorphismScript:
    """Map ``sources[i]`` to ``targets[i]``; each component must hold as many
    sources as targets."""
    return _transport(ctx, sources, targets, single=False).script


def plan_transport(ctx: LevelContext, sources: Sequence, targets: Sequence) -> TransportPlan:
    """Like :func:`transport` but also returns the per-component alphas."""
    return _transport(ctx, sources, targets, single=False)


# -- flexibility -------------------------------------------------------------------

@dataclass
class FlexCertificate:
    point: TowerPoint
    columns: list
    matrix: list
    rank: int
    expected_rank: int
    derivations: list

    @property
    def valid(self) -> bool:
        return self.rank == self.expected_rank


def flexibility_certificate(ctx: LevelContext, p) -> FlexCertificate:
    """Tangent vectors at a hyperbolic point from ``n`` V-side lifts with
    ``q = v`` and one U-side lift with ``q = u``; valid iff their rank is ``n + 1``."""
    p = TowerPoint({x: p[x] for x in ctx.variables})
    if not ctx.on_variety(p):
        raise PreconditionError(f"{p} is off the variety")
    if not ctx.is_regular(p):
        raise PreconditionError(f"{p} is singular")
    if not ctx.is_hyperbolic(p):
        raise PreconditionError(f"{p} is not hyperbolic")
    r = ctx.lower(p)
    n = ctx.geometry.dim
    xis = ctx.geometry.flexibility_lnds(r)
    derivations = [lift_lnd(xi, Polynomial.var(ctx.v), ctx, Side.V) for xi in xis]
    i = next((k for k, xi in enumerate(xis)
              if evaluate(apply_derivation(xi, ctx.f), r) != 0), None)
    if i is None:
        raise NoFlexibleDirectionError(f"no flexible direction moves f at {r}")
    derivations.append(lift_lnd(xis[i], Polynomial.var(ctx.u), ctx, Side.U))
    columns = ctx.variables
    matrix = [[evaluate(d.images[x], p) for x in columns] for d in derivations]
    return FlexCertificate(p, columns, matrix, linalg.rank(matrix), n + 1, derivations)
