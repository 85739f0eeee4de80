"""Run the alpha-choice contraction loop on a mock base with range [1, 4].

Prints one row per loop iteration: the v-coordinate before and after, the
exact contraction factor and its bound.

    python3 scripts/contraction_demo.py --spread 1000000 --points 3
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from affsusp.geometry import MockGeometry, RangeDescriptor
from affsusp.polyring import format_rational
from affsusp.tower import TowerPoint
from affsusp.transit import ChoiceAlphaConfig, LevelContext, apply_script, choose_alpha


@dataclass
class DemoConfig:
    spread: Fraction = Fraction(10**6)
    points: int = 2
    lo: Fraction = Fraction(1)
    hi: Fraction = Fraction(4)


def build(cfg: DemoConfig):
    values = [cfg.lo + (cfg.hi - cfg.lo) * Fraction(k + 1, cfg.points + 1) for k in range(cfg.points)]
    g = MockGeometry({"Y": RangeDescriptor.bounded(cfg.lo, cfg.hi)},
                     {k + 1: (val, "Y") for k, val in enumerate(values)})
    ctx = LevelContext(g, None, "u", "v")
    # smallest v is 1/3, largest is spread/3, the rest sit just above the smallest
    vs = [Fraction(k + 1, 3) for k in range(cfg.points - 1)] + [cfg.spread / 3]
    pts = [TowerPoint({"t": k + 1, "u": values[k] / v, "v": v}) for k, v in enumerate(vs)]
    return ctx, pts


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spread", type=Fraction, default=DemoConfig.spread)
    ap.add_argument("--points", type=int, default=DemoConfig.points)
    args = ap.parse_args(argv)
    cfg = DemoConfig(spread=args.spread, points=args.points)
    ctx, pts = build(cfg)
    res = choose_alpha(ctx, pts, cfg=ChoiceAlphaConfig())
    print(f"{'iter':>4}  {'v before':>14}  {'v after':>14}  {'factor':>12}  bound")
    for tr in res.trace:
        print(f"{tr['iteration']:>4}  {float(tr['v_before']):>14.6g}  {float(tr['v_after']):>14.6g}  "
              f"{format_rational(tr['factor']):>12}  {format_rational(tr['bound'])}")
    assert apply_script(res.script, pts) == res.points
    vs = [abs(q["v"]) for q in res.points]
    print(f"alpha = {format_rational(res.alpha)}, final spread {float(max(vs) / min(vs)):.4g}, "
          f"{len(res.trace)} iterations, {len(res.script)} script steps")


if __name__ == "__main__":
    main()
