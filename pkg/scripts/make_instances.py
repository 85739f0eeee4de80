"""Write sample instance files for the command line tool.

    python3 scripts/make_instances.py instances/
    affsusp describe instances/parabola.json
"""

import argparse
from fractions import Fraction as F
from pathlib import Path

from affsusp import formats
from affsusp.geometry import RangeDescriptor
from affsusp.tower import TowerPoint


def parabola():
    # uv = x + y^2 over the plane
    def pt(x, y, u, v):
        return TowerPoint({"x": F(x), "y": F(y), "u": F(u), "v": F(v)})
    src = [pt(1, 1, 1, 2), pt(0, 0, 0, 5)]
    tgt = [pt(3, -1, 2, 2), pt(0, 0, 0, 0)]
    return formats.affine_instance(["x", "y"], [("u", "v", "x + y^2", "x")], src, tgt)


def tower():
    # uv = x + y^2, then u2 v2 = u
    def pt(x, y, u, v, u2, v2):
        return TowerPoint({k: F(val) for k, val in zip(["x", "y", "u", "v", "u2", "v2"],
                                                        [x, y, u, v, u2, v2])})
    src = [pt(1, 1, 1, 2, 1, 1), pt(0, 0, 0, 3, 2, 0)]
    tgt = [pt(7, 1, 2, 4, 2, 1), pt(-4, 2, 0, 1, 0, 5)]
    return formats.affine_instance(["x", "y"], [("u", "v", "x + y^2", "x"), ("u2", "v2", "u", "u")],
                                   src, tgt)


def mock():
    # two base components, one with range [1, 4]
    comps = {"Y": RangeDescriptor.bounded(1, 4), "Z": RangeDescriptor.full_line()}
    tokens = {1: (F(2), "Y"), 2: (F(3), "Y"), 3: (F(5), "Z"), 4: (F(-1), "Z")}

    def pt(t, v):
        return TowerPoint({"t": F(t), "u": tokens[t][0] / F(v), "v": F(v)})
    src = [pt(1, F(1, 100)), pt(3, 2)]
    tgt = [pt(2, 1000), pt(4, -3)]
    return formats.mock_instance(comps, tokens, src, tgt)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", type=Path)
    args = ap.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, build in (("parabola", parabola), ("tower", tower), ("mock", mock)):
        path = args.outdir / f"{name}.json"
        path.write_text(formats.dumps(build()))
        print(path)


if __name__ == "__main__":
    main()
