from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from affsusp.config import ChoiceAlphaConfig, EngineOptions, generic_param
from affsusp.derivation import AutomorphismScript, Derivation, FlowStep
from affsusp.errors import (
    ComponentMismatchError,
    DegenerateInputError,
    ExhaustionError,
    NotDivisibleError,
    PreconditionError,
)
from affsusp.geometry import MockGeometry, RangeDescriptor, RangeKind, TowerGeometry
from affsusp.polyring import Polynomial, evaluate, parse_poly
from affsusp.tower import Side, TowerPoint, check_point, preserves_relations
from affsusp.transit import (
    LevelContext,
    apply_script,
    avoid_zero,
    choose_alpha,
    distinct_coords,
    flexibility_certificate,
    level_transit,
    lift_base_script,
    lift_lnd,
    stab_multiplier,
    transport,
    transport_component,
)

from conftest import (
    depth_two_points,
    depth_two_tower,
    nonzero_rationals,
    parabola_points,
    parabola_tower,
    rationals,
)

P = parse_poly
F = Fraction


def pt(**c):
    return TowerPoint({k: F(v) for k, v in c.items()})


def parabola_ctx():
    return LevelContext.for_tower(parabola_tower())


def sound(ctx, script, sources, targets):
    tower = ctx.tower
    assert all(preserves_relations(s.derivation, tower) for s in script.steps)
    assert apply_script(script, sources) == list(targets)


# -- lifts and multipliers -----------------------------------------------------------

def test_lift_lnd_examples():
    ctx = parabola_ctx()
    dx = Derivation({"x": P("1"), "y": P("0")})
    dy = Derivation({"x": P("0"), "y": P("1")})
    assert lift_lnd(dx, P("v"), ctx, Side.V).images == {"x": P("v"), "y": P("0"), "v": P("0"), "u": P("1")}
    assert lift_lnd(dx, Polynomial(), ctx, Side.V).is_zero()
    assert lift_lnd(dy, P("v^2"), ctx, Side.V).images["u"] == P("2*y*v")
    with pytest.raises(NotDivisibleError):
        lift_lnd(dx, P("v + 1"), ctx, Side.V)


def test_stab_multiplier_examples():
    assert stab_multiplier(2, [1], "z") == P("1/2*z^2 - 1/2*z")
    assert stab_multiplier(1, [], "z") == P("z")
    with pytest.raises(DegenerateInputError):
        stab_multiplier(0, [], "z")
    with pytest.raises(DegenerateInputError):
        stab_multiplier(2, [2], "z")
    with pytest.raises(DegenerateInputError):
        stab_multiplier(2, [1, 1], "z")


@given(nonzero_rationals, st.lists(nonzero_rationals, max_size=4, unique=True))
def test_stab_multiplier_values(c0, fixed):
    assume(c0 not in fixed)
    q = stab_multiplier(c0, fixed, "z")
    assert evaluate(q, {"z": c0}) == 1
    assert all(evaluate(q, {"z": c}) == 0 for c in fixed + [F(0)])


def test_lift_base_script_examples():
    ctx = parabola_ctx()
    base = AutomorphismScript((FlowStep(Derivation({"x": P("1"), "y": P("0")}), F(3)),))
    lifted = lift_base_script(base, P("1/2*v"), ctx, Side.V)
    p = pt(x=3, y=1, u=2, v=2)
    (img,) = apply_script(lifted, [p])
    assert (img["x"], img["y"], img["v"]) == (6, 1, 2)
    assert len(lift_base_script(AutomorphismScript(), P("v"), ctx, Side.V)) == 0


# -- level transit -------------------------------------------------------------------------

def test_level_transit_example():
    ctx = parabola_ctx()
    s = level_transit(ctx, Side.V, 2, [], [pt(x=3, y=1, u=2, v=2)], [pt(x=0, y=1, u=F(1, 2), v=2)])
    sound(ctx, s, [pt(x=3, y=1, u=2, v=2)], [pt(x=0, y=1, u=F(1, 2), v=2)])
    same = [pt(x=3, y=1, u=2, v=2)]
    assert len(level_transit(ctx, Side.V, 2, [], same, same)) == 0


@given(st.data())
@settings(max_examples=25)
def test_level_transit_fixes_fixed_levels(data):
    ctx = parabola_ctx()
    c0 = data.draw(nonzero_rationals)
    c1 = data.draw(nonzero_rationals.filter(lambda c: c != c0))
    side = data.draw(st.sampled_from([Side.U, Side.V]))
    r = data.draw(st.tuples(rationals, rationals))
    s_base, t_base = ctx.geometry.section(ctx.f, r[0]), ctx.geometry.section(ctx.f, r[1], avoid=())
    src, tgt = ctx.level_point(s_base, side, c0), ctx.level_point(t_base, side, c0)
    s = level_transit(ctx, side, c0, [c1], [src], [tgt])
    sound(ctx, s, [src], [tgt])
    on_fixed = [ctx.level_point(TowerPoint({"x": data.draw(rationals), "y": data.draw(rationals)}),
                                side, c1) for _ in range(5)]
    assert apply_script(s, on_fixed) == on_fixed


def test_level_transit_rejects_points_off_level():
    ctx = parabola_ctx()
    with pytest.raises(PreconditionError):
        level_transit(ctx, Side.V, 1, [], [pt(x=3, y=1, u=2, v=2)], [pt(x=3, y=1, u=2, v=2)])


# -- hyperbolisation and separation ------------------------------------------------------------

def test_avoid_zero_examples():
    ctx = parabola_ctx()
    hyper = [pt(x=3, y=1, u=2, v=2)]
    assert len(avoid_zero(ctx, hyper)) == 0
    origin = pt(x=0, y=0, u=0, v=0)
    s = avoid_zero(ctx, [origin])
    (img,) = apply_script(s, [origin])
    assert ctx.is_hyperbolic(img)
    check_point(ctx.tower, img)
    case1 = [pt(x=-1, y=1, u=0, v=1), pt(x=3, y=1, u=2, v=2)]
    s = avoid_zero(ctx, case1)
    assert all(ctx.is_hyperbolic(q) for q in apply_script(s, case1))


@st.composite
def mixed_point_sets(draw):
    """Hyperbolic points plus forced zero-coordinate points, all distinct."""
    pts = draw(st.lists(parabola_points(), min_size=1, max_size=4))
    pts.append(pt(x=0, y=0, u=0, v=0))
    y = draw(rationals)
    pts.append(TowerPoint({"x": -y * y, "y": y, "u": F(0), "v": draw(nonzero_rationals)}))
    pts.append(TowerPoint({"x": -y * y + 0, "y": y, "u": draw(nonzero_rationals), "v": F(0)}))
    return list(dict.fromkeys(pts))


@given(mixed_point_sets())
@settings(max_examples=25)
def test_avoid_zero_property(pts):
    ctx = parabola_ctx()
    s = avoid_zero(ctx, pts)
    images = apply_script(s, pts)
    assert all(ctx.is_hyperbolic(q) for q in images)
    assert all(preserves_relations(st_.derivation, ctx.tower) for st_ in s.steps)


def test_distinct_coords_examples():
    ctx = parabola_ctx()
    sep = [pt(x=3, y=1, u=2, v=2), pt(x=0, y=2, u=1, v=4)]
    assert len(distinct_coords(ctx, sep)) == 0
    shared_v = [pt(x=3, y=1, u=2, v=2), pt(x=0, y=0, u=0, v=2)]
    imgs = apply_script(distinct_coords(ctx, shared_v), shared_v)
    assert len({q["u"] for q in imgs}) == 2 and len({q["v"] for q in imgs}) == 2
    same_base = [pt(x=1, y=1, u=1, v=2), pt(x=1, y=1, u=2, v=1)]
    assert len(distinct_coords(ctx, same_base)) == 0


@given(st.lists(parabola_points(), min_size=2, max_size=4, unique=True))
@settings(max_examples=25)
def test_distinct_coords_property(pts):
    ctx = parabola_ctx()
    imgs = apply_script(distinct_coords(ctx, pts), pts)
    assert len({q["u"] for q in imgs}) == len(pts)
    assert len({q["v"] for q in imgs}) == len(pts)
    assert all(ctx.is_hyperbolic(q) for q in imgs)


# -- alpha --------------------------------------------------------------------------------

def mock_ctx(components, tokens):
    return LevelContext(MockGeometry(components, tokens), None, "u", "v")


def test_choose_alpha_full_line():
    ctx = parabola_ctx()
    res = choose_alpha(ctx, [pt(x=1, y=0, u=1, v=1), pt(x=4, y=0, u=2, v=2)])
    assert len(res.script) == 0 and res.alpha == 1


def test_choose_alpha_bounded_no_contraction():
    ctx = mock_ctx({"Y": RangeDescriptor.bounded(1, 4)}, {1: (2, "Y"), 2: (3, "Y")})
    pts = [TowerPoint({"t": 1, "u": 2, "v": 1}), TowerPoint({"t": 2, "u": 1, "v": 3})]
    res = choose_alpha(ctx, pts)
    assert len(res.script) == 0
    assert res.alpha == F(7, 6) and 1 < res.alpha < F(4, 3)


def test_choose_alpha_contraction():
    ctx = mock_ctx({"Y": RangeDescriptor.bounded(1, 4)}, {1: (2, "Y"), 2: (3, "Y")})
    pts = [TowerPoint({"t": 1, "u": 2, "v": 1}), TowerPoint({"t": 2, "u": F(3, 8), "v": 8})]
    res = choose_alpha(ctx, pts)
    eps = F(3, 4)
    assert res.trace and all(tr["factor"] <= (1 + eps) / (4 - eps) for tr in res.trace)
    vs = [abs(q["v"]) for q in res.points]
    assert max(vs) / min(vs) < 4
    assert all(RangeDescriptor.bounded(1, 4).contains(res.alpha * q["v"]) for q in res.points)
    assert apply_script(res.script, pts) == res.points


@pytest.mark.parametrize("rng,vs", [
    (RangeDescriptor(RangeKind.ZERO_INTERIOR, F(-1), F(2)), [F(3), F(-5)]),
    (RangeDescriptor(RangeKind.UNBOUNDED_POSITIVE, F(3), None), [F(1), F(7)]),
    (RangeDescriptor(RangeKind.UNBOUNDED_NEGATIVE, None, F(-3)), [F(-1), F(-7)]),
    (RangeDescriptor.bounded(0, 2), [F(1), F(5)]),
    (RangeDescriptor.bounded(-4, -1), [F(1), F(2)]),
])
def test_choose_alpha_lands_inside(rng, vs):
    value = next(rng.candidates())
    ctx = mock_ctx({"Y": rng}, {1: (value, "Y"), 2: (value, "Y")})
    pts = [TowerPoint({"t": i + 1, "u": value / v, "v": v}) for i, v in enumerate(vs)]
    res = choose_alpha(ctx, pts, comp=ctx.component_of(pts[0]))
    assert all(rng.contains(res.alpha * q["v"]) for q in res.points)


# -- transport --------------------------------------------------------------------------

def test_transport_component_example():
    ctx = parabola_ctx()
    src, tgt = [pt(x=3, y=1, u=2, v=2)], [pt(x=0, y=2, u=1, v=4)]
    sound(ctx, transport_component(ctx, src, tgt), src, tgt)
    assert len(transport_component(ctx, src, src)) == 0


@given(st.lists(parabola_points(), min_size=2, max_size=6, unique=True))
@settings(max_examples=20)
def test_transport_property(pts):
    ctx = parabola_ctx()
    m = len(pts) // 2
    src, tgt = pts[:m], pts[m:2 * m]
    s = transport(ctx, src, tgt)
    sound(ctx, s, src, tgt)


@given(st.lists(depth_two_points(), min_size=2, max_size=4, unique=True))
@settings(max_examples=8)
def test_transport_depth_two(pts):
    ctx = LevelContext.for_tower(depth_two_tower())
    m = len(pts) // 2
    sound(ctx, transport(ctx, pts[:m], pts[m:2 * m]), pts[:m], pts[m:2 * m])


def test_single_component_transport_agrees():
    ctx = parabola_ctx()
    src = [pt(x=3, y=1, u=2, v=2), pt(x=0, y=0, u=0, v=0)]
    tgt = [pt(x=0, y=2, u=1, v=4), pt(x=-1, y=1, u=0, v=7)]
    a, b = transport(ctx, src, tgt), transport_component(ctx, src, tgt)
    assert apply_script(a, src) == apply_script(b, src) == tgt


def two_component_mock():
    comps = {"Y": RangeDescriptor.bounded(1, 4)}
    tokens = {1: (2, "Y"), 2: (3, "Y"), 3: (F(3, 2), "Y"), 4: (F(5, 2), "Y")}
    return mock_ctx(comps, tokens)


def test_transport_two_mock_components():
    ctx = two_component_mock()
    src = [TowerPoint({"t": 1, "u": 2, "v": 1}), TowerPoint({"t": 2, "u": -3, "v": -1})]
    tgt = [TowerPoint({"t": 3, "u": 3, "v": F(1, 2)}), TowerPoint({"t": 4, "u": -1, "v": F(-5, 2)})]
    assert {ctx.component_of(p) for p in src} == {("Y", 1), ("Y", -1)}
    s = transport(ctx, src, tgt)
    assert apply_script(s, src) == tgt


def test_component_mismatch():
    ctx = two_component_mock()
    src = [TowerPoint({"t": 1, "u": 2, "v": 1})]
    tgt = [TowerPoint({"t": 2, "u": -3, "v": -1})]
    with pytest.raises(ComponentMismatchError):
        transport(ctx, src, tgt)


def test_transport_rejects_bad_input():
    ctx = parabola_ctx()
    with pytest.raises(PreconditionError):
        transport(ctx, [pt(x=0, y=0, u=1, v=1)], [pt(x=3, y=1, u=2, v=2)])
    with pytest.raises(PreconditionError):
        transport(ctx, [pt(x=3, y=1, u=2, v=2)] * 2, [pt(x=0, y=2, u=1, v=4), pt(x=0, y=0, u=0, v=0)])


# -- flexibility ----------------------------------------------------------------------------

def test_worked_flexibility_matrix():
    cert = flexibility_certificate(parabola_ctx(), pt(x=1, y=1, u=1, v=2))
    assert cert.matrix == [[2, 0, 1, 0], [0, 2, 2, 0], [1, 0, 0, 1]]
    assert cert.rank == 3 and cert.valid


def test_flexibility_scaling_and_preconditions():
    ctx = parabola_ctx()
    assert flexibility_certificate(ctx, pt(x=1, y=1, u=F(1, 3), v=6)).valid
    with pytest.raises(PreconditionError):
        flexibility_certificate(ctx, pt(x=0, y=0, u=0, v=0))


@given(depth_two_points(hyperbolic=True))
@settings(max_examples=20)
def test_flexibility_depth_two(p):
    cert = flexibility_certificate(LevelContext.for_tower(depth_two_tower()), p)
    assert cert.rank == 4 and cert.valid


# -- generic parameters -------------------------------------------------------------------------

def test_generic_param_examples():
    assert generic_param([lambda t: t != 0]) == 1
    assert generic_param([lambda t: t not in {1, -1, 2}]) == -2
    assert generic_param([]) == 1
    with pytest.raises(ExhaustionError):
        generic_param([lambda t: False], cap=10)
