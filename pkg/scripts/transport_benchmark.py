"""Time transport and verification on random instances of the parabola
tower uv = x + y^2 and its depth-two extension u2 v2 = u1.

    python3 scripts/transport_benchmark.py --depth 2 --max-m 3 --instances 20
"""

import argparse
import random
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction

from affsusp.polyring import parse_poly
from affsusp.tower import SuspensionTower, TowerPoint, suspend
from affsusp.transit import LevelContext, transport
from affsusp.verify import verify_script


@dataclass
class BenchConfig:
    depth: int = 1
    instances: int = 20
    max_m: int = 4
    height: int = 20
    seed: int = 0


def tower(depth):
    t = suspend(SuspensionTower.affine(["x", "y"]), parse_poly("x + y^2"), "u1", "v1")
    if depth == 2:
        t = suspend(t, parse_poly("u1"), "u2", "v2")
    return t


def random_point(rnd, depth, h):
    def q():
        return Fraction(rnd.randint(-h, h), rnd.randint(1, h))
    while True:
        y, u1, v1 = q(), q(), q()
        p = {"x": u1 * v1 - y * y, "y": y, "u1": u1, "v1": v1}
        if depth == 2:
            u2 = q()
            if u2 == 0:
                continue
            p.update(u2=u2, v2=u1 / u2)
        return TowerPoint(p)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(BenchConfig()).items():
        ap.add_argument(f"--{name.replace('_', '-')}", type=int, default=default)
    cfg = BenchConfig(**vars(ap.parse_args(argv)))
    rnd = random.Random(cfg.seed)
    t = tower(cfg.depth)
    ctx = LevelContext.for_tower(t)
    rows = []
    for _ in range(cfg.instances):
        m = rnd.randint(1, cfg.max_m)
        pts = []
        while len(pts) < 2 * m:
            p = random_point(rnd, cfg.depth, cfg.height)
            if p not in pts:
                pts.append(p)
        t0 = time.perf_counter()
        script = transport(ctx, pts[:m], pts[m:])
        t1 = time.perf_counter()
        rep = verify_script(script, pts[:m], pts[m:], t.variables, t)
        t2 = time.perf_counter()
        assert rep.ok, rep.lines()
        rows.append((m, len(script), t1 - t0, t2 - t1))
    print(f"depth {cfg.depth}, {cfg.instances} instances")
    print(f"{'m':>2}  {'count':>5}  {'steps':>6}  {'solve s':>8}  {'verify s':>9}")
    for m in sorted({r[0] for r in rows}):
        sel = [r for r in rows if r[0] == m]
        print(f"{m:>2}  {len(sel):>5}  {statistics.mean(r[1] for r in sel):>6.1f}  "
              f"{statistics.mean(r[2] for r in sel):>8.3f}  {statistics.mean(r[3] for r in sel):>9.3f}")


if __name__ == "__main__":
    main()
