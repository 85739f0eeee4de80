"""Acceptance criteria, all checked with exact arithmetic.

Each test prints one line ``criterion N [...]: PASS|FAIL ...``; the conftest
summary hook repeats them at the end of the run.  Running this file directly
(``python3 tests/test_acceptance.py``) prints the same lines.
"""

import json
import math
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from affsusp import formats
from affsusp.cli import main
from affsusp.derivation import AutomorphismScript, Derivation, FlowStep, compose, exp_flow
from affsusp.errors import SuspError
from affsusp.geometry import MockGeometry, RangeDescriptor
from affsusp.polyring import Polynomial, format_poly, format_rational, parse_poly
from affsusp.tower import Side, SuspensionTower, TowerPoint, check_point, lift_derivation, suspend
from affsusp.transit import (
    ChoiceAlphaConfig,
    LevelContext,
    apply_script,
    avoid_zero,
    choose_alpha,
    flexibility_certificate,
    level_transit,
    plan_transport,
)
from affsusp.verify import run_script

F = Fraction
RESULTS = {}

TITLES = {
    1: "end-to-end transport, depth 1",
    2: "end-to-end transport, depth 2",
    3: "stabilizer fixes its levels",
    4: "hyperbolization",
    5: "contraction loop",
    6: "flexibility certificates",
    7: "flow group law and inverses",
    8: "component preservation",
    9: "negative controls",
}


def report(n, ok, detail):
    line = f"criterion {n} [{TITLES[n]}]: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


# -- samplers ---------------------------------------------------------------------

def bounded_rational(rnd, bound=20):
    return F(rnd.randint(-bound, bound), rnd.randint(1, bound))


def small(q, bound=20):
    return abs(q.numerator) <= bound and q.denominator <= bound


def parabola_point(rnd):
    """Point of uv = x + y^2 with every coordinate of height at most 20."""
    while True:
        y, u, v = (bounded_rational(rnd) for _ in range(3))
        x = u * v - y * y
        if small(x):
            return TowerPoint({"x": x, "y": y, "u": u, "v": v})


def depth_two_point(rnd, hyperbolic=False):
    while True:
        y, u1, v1, u2 = (bounded_rational(rnd) for _ in range(4))
        if u2 == 0 or (hyperbolic and (u1 == 0 or v1 == 0)):
            continue
        x, v2 = u1 * v1 - y * y, u1 / u2
        if small(x) and small(v2):
            return TowerPoint({"x": x, "y": y, "u1": u1, "v1": v1, "u2": u2, "v2": v2})


def distinct(rnd, sampler, m):
    pts = []
    while len(pts) < m:
        p = sampler(rnd)
        if p not in pts:
            pts.append(p)
    return pts


PARABOLA = [("u", "v", "x + y^2", "x")]
DEPTH_TWO = [("u1", "v1", "x + y^2", "x"), ("u2", "v2", "u1", "u1")]


def parabola_tower():
    return suspend(SuspensionTower.affine(["x", "y"]), parse_poly("x + y^2"), "u", "v")


def depth_two_tower():
    return suspend(suspend(SuspensionTower.affine(["x", "y"]), parse_poly("x + y^2"), "u1", "v1"),
                   parse_poly("u1"), "u2", "v2")


def solve_and_verify(tmp, name, levels, src, tgt):
    """Run the CLI solve and verify commands; return (exit codes, verify report)."""
    inst = formats.affine_instance(["x", "y"], levels, src, tgt)
    ipath, cpath, rpath = tmp / f"{name}.json", tmp / f"{name}.cert.json", tmp / f"{name}.rep.json"
    ipath.write_text(formats.dumps(inst))
    solve_code = main(["solve", str(ipath), "-o", str(cpath)])
    verify_code = main(["verify", str(ipath), str(cpath), "-o", str(rpath)])
    return solve_code, verify_code, json.loads(rpath.read_text())


def end_to_end(tmp, levels, sampler, instances, max_m, seed):
    rnd = random.Random(seed)
    failures, steps = [], 0
    for k in range(instances):
        m = rnd.randint(1, max_m)
        pts = distinct(rnd, sampler, 2 * m)
        codes = solve_and_verify(tmp, f"i{k}", levels, pts[:m], pts[m:])
        solve_code, verify_code, rep = codes
        steps += rep["steps"]
        if solve_code or verify_code or not rep["ok"] or rep["checked"]["relations"] != rep["steps"]:
            failures.append((k, solve_code, verify_code, rep["failures"][:2]))
    return failures, steps


# -- criteria ------------------------------------------------------------------------

def test_criterion_1_depth_one(tmp_path, capsys):
    t0 = time.time()
    failures, steps = end_to_end(tmp_path, PARABOLA, parabola_point, 50, 4, seed=1)
    dt = time.time() - t0
    capsys.readouterr()
    report(1, not failures and dt < 300,
           f"50 instances, {steps} steps verified, {dt:.1f}s, failures={failures[:3]}")


def test_criterion_2_depth_two(tmp_path, capsys):
    t0 = time.time()
    failures, steps = end_to_end(tmp_path, DEPTH_TWO, depth_two_point, 20, 3, seed=2)
    dt = time.time() - t0
    capsys.readouterr()
    report(2, not failures and dt < 600,
           f"20 instances, {steps} steps verified, {dt:.1f}s, failures={failures[:3]}")


def test_criterion_3_stabilizer(capsys):
    rnd = random.Random(3)
    ctx = LevelContext.for_tower(parabola_tower())
    bad = 0
    for _ in range(25):
        side = rnd.choice([Side.U, Side.V])
        c0 = bounded_rational(rnd) or F(1)
        c1 = c0
        while c1 == c0 or c1 == 0:
            c1 = bounded_rational(rnd)
        r_src = TowerPoint({"x": bounded_rational(rnd), "y": bounded_rational(rnd)})
        r_tgt = TowerPoint({"x": bounded_rational(rnd), "y": bounded_rational(rnd)})
        src, tgt = ctx.level_point(r_src, side, c0), ctx.level_point(r_tgt, side, c0)
        s = level_transit(ctx, side, c0, [c1], [src], [tgt])
        on_fixed = [ctx.level_point(TowerPoint({"x": bounded_rational(rnd), "y": bounded_rational(rnd)}),
                                    side, c1) for _ in range(10)]
        if apply_script(s, on_fixed) != on_fixed or apply_script(s, [src]) != [tgt]:
            bad += 1
    report(3, bad == 0, f"25 runs x 10 points on the fixed level, {bad} mismatches")


def test_criterion_4_hyperbolization(capsys):
    rnd = random.Random(4)
    ctx = LevelContext.for_tower(parabola_tower())
    tower = ctx.tower
    bad, case1, case2 = 0, 0, 0
    for _ in range(25):
        pts = distinct(rnd, parabola_point, rnd.randint(1, 3))
        y = bounded_rational(rnd)
        forced = [TowerPoint({"x": -y * y, "y": y, "u": F(0), "v": F(0)}),
                  TowerPoint({"x": -y * y, "y": y, "u": F(0), "v": bounded_rational(rnd) or F(1)})]
        y2 = bounded_rational(rnd)
        forced.append(TowerPoint({"x": -y2 * y2, "y": y2, "u": bounded_rational(rnd) or F(-1), "v": F(0)}))
        pts = list(dict.fromkeys(pts + forced))
        before = [ctx.is_hyperbolic(p) for p in pts]
        s = avoid_zero(ctx, pts)
        case1 += sum(1 for st in s.steps if "case1" in st.stage)
        case2 += sum(1 for st in s.steps if "case2" in st.stage)
        after = apply_script(s, pts)
        for p in after:
            check_point(tower, p)
        if not all(ctx.is_hyperbolic(p) for p in after):
            bad += 1
        if any(b and not ctx.is_hyperbolic(p) for b, p in zip(before, after)):
            bad += 1
    report(4, bad == 0 and case1 and case2,
           f"25 point sets, {case1} case-1 steps, {case2} case-2 steps, {bad} failures")


def contraction_steps(ratio, eps, a=F(1), b=F(4)):
    """ceil(log(ratio) / log(r)) for r = (b - eps)/(a + eps), computed exactly."""
    r = (b - eps) / (a + eps)
    k, power = 0, F(1)
    while power < ratio:
        power *= r
        k += 1
    return k


def contraction_bound(vs, eps):
    """Iteration bound for the loop on magnitudes ``vs``.  While it runs,
    vmax >= 4 vmin and a move shrinks v by at least 1/4, so vmin never drops
    and each point needs at most ceil(log(v/vmin)/log r) moves."""
    vmin = min(vs)
    return sum(contraction_steps(v / vmin, eps) for v in vs) + 1


def contraction_case(spread, m, eps, rho):
    values = [F(2), F(3), F(5, 2)][:m]
    g = MockGeometry({"Y": RangeDescriptor.bounded(1, 4)},
                     {i + 1: (val, "Y") for i, val in enumerate(values)})
    ctx = LevelContext(g, None, "u", "v")
    base = F(1, 3)
    # m = 3 puts the third point at the geometric middle of the spread
    vs = [base, base * spread, base * max(F(math.isqrt(int(spread))), F(2))][:m]
    pts = [TowerPoint({"t": i + 1, "u": values[i] / v, "v": v}) for i, v in enumerate(vs)]
    res = choose_alpha(ctx, pts, cfg=ChoiceAlphaConfig())
    bound = contraction_bound(vs, eps)
    ok = True
    mags, vmin = list(vs), min(vs)
    for tr in res.trace:
        k = mags.index(abs(tr["v_before"]))
        mags[k] = abs(tr["v_after"])
        ok &= tr["factor"] <= rho and tr["bound"] == rho and min(mags) >= vmin
    out = [abs(q["v"]) for q in res.points]
    ok &= sorted(out) == sorted(mags)
    ok &= all(RangeDescriptor.bounded(1, 4).contains(res.alpha * q["v"]) for q in res.points)
    ok &= apply_script(res.script, pts) == res.points and max(out) / min(out) < 4
    ok &= len(res.trace) <= bound
    return ok, len(res.trace), bound


def test_criterion_5_contraction(capsys):
    eps = F(3, 4)                     # default (b - a)/4 on [1, 4]
    rho = (1 + eps) / (4 - eps)
    lines, bad = [], 0
    for m in (2, 3):
        for spread in [F(4), F(10), F(10**2), F(10**3), F(10**4), F(10**5), F(10**6), F(999_999, 7)]:
            ok, iters, bound = contraction_case(spread, m, eps, rho)
            bad += not ok
            lines.append(f"m={m},{float(spread):.0e}:{iters}/{bound}")
    report(5, bad == 0, f"iterations/bound {' '.join(lines)}; factor <= {rho}")


def test_criterion_6_flexibility(capsys):
    rnd = random.Random(6)
    worked = flexibility_certificate(LevelContext.for_tower(parabola_tower()),
                                     TowerPoint({"x": 1, "y": 1, "u": 1, "v": 2}))
    exact = worked.matrix == [[2, 0, 1, 0], [0, 2, 2, 0], [1, 0, 0, 1]] and \
        all(type(x) is Fraction for row in worked.matrix for x in row)
    ctx1 = LevelContext.for_tower(parabola_tower())
    ctx2 = LevelContext.for_tower(depth_two_tower())
    bad = 0
    for k in range(50):
        if k % 2 == 0:
            p = parabola_point(rnd)
            while not ctx1.is_hyperbolic(p):
                p = parabola_point(rnd)
            cert, n = flexibility_certificate(ctx1, p), 2
        else:
            cert, n = flexibility_certificate(ctx2, depth_two_point(rnd, hyperbolic=True)), 3
        bad += not (cert.valid and cert.rank == n + 1)
    report(6, exact and bad == 0, f"worked matrix exact={exact}; 50 random points, {bad} rank failures")


def random_lift(rnd):
    """A base triangular field on the plane lifted through one or two levels."""
    def rq():
        return F(rnd.randint(-5, 5), rnd.randint(1, 4))
    y = Polynomial.var("y")
    base = Derivation({"x": y * y * rq() + y * rq() + rq(), "y": Polynomial.const(rq())}, "base")
    if rnd.random() < 0.5:
        t = parabola_tower()
        lv, var = t.level(1), rnd.choice(["u", "v"])
        q = Polynomial.var(var) * (Polynomial.var(var) * rq() + rq())
        d = lift_derivation(base, q, lv, Side.V if var == "v" else Side.U)
        return d, t.variables
    t = depth_two_tower()
    d = lift_derivation(base, Polynomial.var("v1") * rq(), t.level(1), Side.V)
    var = rnd.choice(["u2", "v2"])
    q = Polynomial.var(var) * (Polynomial.var(var) * rq() + rq())
    return lift_derivation(d, q, t.level(2), Side.V if var == "v2" else Side.U), t.variables


def test_criterion_7_group_law(capsys):
    rnd = random.Random(7)
    bad = 0
    for _ in range(100):
        d, _ = random_lift(rnd)
        s, t = F(rnd.randint(-9, 9), rnd.randint(1, 5)), F(rnd.randint(-9, 9), rnd.randint(1, 5))
        e = lambda x: exp_flow(FlowStep(d, x))
        if not compose(e(t), e(-t)).is_identity():
            bad += 1
        if compose(e(s), e(t)) != e(s + t):
            bad += 1
    report(7, bad == 0, f"100 lifts, {bad} identity failures")


def keeps_labels(ctx, steps, points):
    labels = [ctx.component_of(p) for p in points]
    try:
        for step in steps:
            points = [run_script(AutomorphismScript((step,)), p, 64) for p in points]
            if [ctx.component_of(p) for p in points] != labels:
                return False
    except SuspError:
        return False
    return True


def test_criterion_8_components(capsys):
    rnd = random.Random(8)
    bad, alpha_pairs = 0, []
    for k in range(10):
        comps = {"Y": RangeDescriptor.bounded(1, 4)}
        values = [F(rnd.randint(11, 39), 10) for _ in range(8)]
        g = MockGeometry(comps, {i + 1: (v, "Y") for i, v in enumerate(values)})
        ctx = LevelContext(g, None, "u", "v")

        def point(tok, sign):
            v = sign * F(rnd.randint(1, 40), rnd.randint(1, 10))
            return TowerPoint({"t": tok, "u": g.token_value(tok) / v, "v": v})

        src = [point(1, 1), point(2, -1), point(3, 1)]
        tgt = [point(4, 1), point(5, -1), point(6, 1)]
        if k % 2:
            src, tgt = src[:2], tgt[:2]
        plan = plan_transport(ctx, src, tgt)
        alphas = list(plan.alphas.values())
        alpha_pairs.append(" vs ".join(format_rational(a) for a in alphas))
        if len(alphas) != 2 or alphas[0] == alphas[1]:
            bad += 1
        if not keeps_labels(ctx, plan.script.steps, src + tgt):
            bad += 1
        final = [run_script(plan.script, p, 64) for p in src]
        if final != tgt:
            bad += 1
    report(8, bad == 0, f"10 two-component mock instances, alphas {'; '.join(alpha_pairs[:3])}, {bad} failures")


def moving_steps(script, sources):
    moving, pts = set(), [dict(p) for p in sources]
    for i, step in enumerate(script.steps):
        nxt = [step.act(p, 64) for p in pts]
        if nxt != pts:
            moving.add(i)
        pts = nxt
    return sorted(moving)


def test_criterion_9_negative_controls(tmp_path, capsys):
    rnd = random.Random(9)
    bad, runs = 0, 0
    for k in range(5):
        m = rnd.randint(1, 3)
        pts = distinct(rnd, parabola_point, 2 * m)
        inst = formats.affine_instance(["x", "y"], PARABOLA, pts[:m], pts[m:])
        ipath, cpath = tmp_path / f"n{k}.json", tmp_path / f"n{k}.cert.json"
        ipath.write_text(formats.dumps(inst))
        assert main(["solve", str(ipath), "-o", str(cpath)]) == 0
        good = json.loads(cpath.read_text())
        # perturb a step that moves some source: a step acting trivially on
        # every trajectory stays a valid certificate under any time change
        loaded = formats.load_instance(inst)
        i = rnd.choice(moving_steps(formats.load_certificate(good, loaded).script, loaded.sources))

        # time perturbed: endpoints fail, relations hold
        cert = json.loads(json.dumps(good))
        cert["steps"][i]["time"] = formats.rat_text(formats.rat(cert["steps"][i]["time"]) + F(1, 3))
        rep = verify_file(tmp_path, ipath, cert, f"t{k}")
        runs += 1
        if rep["ok"] or {f["check"] for f in rep["failures"]} != {"endpoints"}:
            bad += 1

        # derivation image edited: relation check fails at exactly that step
        cert = json.loads(json.dumps(good))
        images = cert["steps"][i]["derivation"]["images"]
        images["x"] = format_poly(parse_poly(images["x"]) + Polynomial.var("u"))
        rep = verify_file(tmp_path, ipath, cert, f"d{k}")
        runs += 1
        rel = [f["index"] for f in rep["failures"] if f["check"] == "relations"]
        if rep["ok"] or rel != [i]:
            bad += 1
    capsys.readouterr()
    report(9, bad == 0, f"{runs} tampered certificates, {bad} misdiagnosed")


def verify_file(tmp, ipath, cert, name):
    cpath, rpath = tmp / f"{name}.cert.json", tmp / f"{name}.rep.json"
    cpath.write_text(formats.dumps(cert))
    code = main(["verify", str(ipath), str(cpath), "-o", str(rpath)])
    rep = json.loads(rpath.read_text())
    assert (code == 0) == rep["ok"]
    return rep


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
