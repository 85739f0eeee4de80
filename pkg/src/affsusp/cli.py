"""Command line front end.

    affsusp solve INSTANCE [-o CERT]
    affsusp verify INSTANCE CERT [-o REPORT]
    affsusp certify-flex INSTANCE [--point "x=1,y=1,u=1,v=2"] [-o FILE]
    affsusp describe INSTANCE

Exit codes: 0 success, 2 parse, 3 precondition, 4 engine, 5 verification.
Errors go to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter

from . import formats
from .errors import OffVarietyError, SuspError
from .geometry import MockGeometry
from .polyring import format_poly, format_rational
from .tower import check_point
from .transit import flexibility_certificate, transport
from .verify import verify_instance

EXIT = {"ok": 0, "parse": 2, "precondition": 3, "engine": 4, "verification": 5}

log = logging.getLogger("affsusp")


def label_text(label) -> str:
    if isinstance(label, tuple):
        if len(label) == 1:
            return label_text(label[0])
        return f"{label_text(label[0])}:u{'+' if label[1] > 0 else '-'}"
    return str(label)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text: str):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _instance(args):
    overrides = {"nilpotency_cap": args.nilpotency_cap, "generic_cap": args.generic_cap}
    return formats.load_instance(formats.loads(_read(args.instance)), overrides)


# -- subcommands -----------------------------------------------------------------

def cmd_solve(args) -> int:
    inst = _instance(args)
    script = transport(inst.ctx, inst.sources, inst.targets)
    stages = Counter(step.stage.split("/")[1] if "/" in step.stage else step.stage
                     for step in script.steps)
    log.info("script has %d steps: %s", len(script), dict(stages))
    report = verify_instance(inst, script)
    cert = formats.certificate_json(inst, script, report.summary())
    _write(args.output, formats.dumps(cert))
    if not report.ok:
        for line in report.lines():
            print(line, file=sys.stderr)
        return EXIT["verification"]
    return EXIT["ok"]


def cmd_verify(args) -> int:
    inst = _instance(args)
    cert = formats.load_certificate(formats.loads(_read(args.certificate)), inst)
    report = verify_instance(inst, cert.script, cert.instance_digest)
    for line in report.lines():
        print(line)
    print("PASS" if report.ok else "FAIL")
    if args.output:
        _write(args.output, formats.dumps(report.summary()))
    return EXIT["ok"] if report.ok else EXIT["verification"]


def cmd_certify_flex(args) -> int:
    inst = _instance(args)
    if args.point:
        p = formats.parse_point_text(args.point, inst.variables)
    elif inst.points or inst.sources:
        p = (inst.points or inst.sources)[0]
    else:
        raise formats.FormatError("no point given (use --point or a points list)")
    cert = flexibility_certificate(inst.ctx, p)
    out = {"format": formats.FLEX_FORMAT, "version": formats.VERSION,
           "instance_digest": inst.digest,
           "point": formats.point_json(cert.point, inst.variables),
           "columns": cert.columns,
           "matrix": [[formats.rat_text(x) for x in row] for row in cert.matrix],
           "rank": cert.rank, "expected_rank": cert.expected_rank,
           "valid": cert.valid,
           "derivations": [d.label for d in cert.derivations]}
    _write(args.output, formats.dumps(out))
    return EXIT["ok"] if cert.valid else EXIT["verification"]


def describe_lines(inst) -> list:
    ctx = inst.ctx
    geo = ctx.geometry
    lines = []
    if isinstance(geo, MockGeometry):
        lines.append(f"mock base of dimension {geo.dim}, {len(geo.tokens)} tokens; "
                     f"suspension variables {ctx.u}, {ctx.v}; dim X = {geo.dim + 1}")
        for name, rng in geo.components.items():
            lines.append(f"base component {name}: range {rng}")
    else:
        t = inst.tower
        lines.append(f"tower over A^{t.base_dim} ({', '.join(t.base_vars)}), depth {t.depth}, "
                     f"ambient dimension {len(t.variables)}, dim X = {t.dim}")
        lvl_ctx = []
        c = ctx
        while True:
            lvl_ctx.append(c)
            g = c.geometry
            if g.tower.depth == 0:
                break
            c = g.top_level()
        for c in reversed(lvl_ctx):
            w = c.geometry.designated_var(c.f, c.designated)
            rng = c.geometry.range_of(c.f, None, c.designated)
            lines.append(f"level {c.index}: {format_poly(c.level.relation)} = 0, "
                         f"designated {w}, range {rng}")
    labels = ctx.component_labels()
    noun = "component" if len(labels) == 1 else "components"
    lines.append(f"{len(labels)} {noun}: {', '.join(label_text(x) for x in labels)}")
    for group, pts in (("source", inst.sources), ("target", inst.targets), ("point", inst.points)):
        for i, p in enumerate(pts):
            coords = ", ".join(f"{x}={format_rational(p[x])}" for x in inst.variables)
            lines.append(f"{group} {i}: ({coords}) " + _point_flags(inst, p))
    return lines


def _point_flags(inst, p) -> str:
    ctx = inst.ctx
    if inst.tower is not None:
        try:
            check_point(inst.tower, p)
        except OffVarietyError as err:
            return f"OFF VARIETY at level {err.level}"
    elif not ctx.on_variety(p):
        return "OFF VARIETY at level 1"
    flags = ["regular" if ctx.is_regular(p) else "singular"]
    flags.append("hyperbolic" if ctx.is_hyperbolic(p) else "not hyperbolic")
    if flags[0] == "regular":
        flags.append(f"component {label_text(ctx.component_of(p))}")
    return ", ".join(flags)


def cmd_describe(args) -> int:
    inst = _instance(args)
    for line in describe_lines(inst):
        print(line)
    return EXIT["ok"]


# -- entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="affsusp",
                                     description="Automorphisms of affine suspensions uv = f.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="instance JSON file ('-' for stdin)")
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("--nilpotency-cap", type=int, default=None)
    common.add_argument("--generic-cap", type=int, default=None)
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", parents=[common], help="build a transport certificate")
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("verify", parents=[common], help="check a certificate")
    p.add_argument("certificate", help="certificate JSON file")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("certify-flex", parents=[common], help="flexibility certificate at a point")
    p.add_argument("--point", help='point as "x=1, y=1, u=1, v=2"')
    p.set_defaults(func=cmd_certify_flex)
    p = sub.add_parser("describe", parents=[common], help="summarise an instance")
    p.set_defaults(func=cmd_describe)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except SuspError as err:
        payload = {"family": err.family, "code": err.code, "message": str(err)}
        if err.stage is not None:
            payload["stage"] = err.stage
        print(json.dumps({"error": payload}), file=sys.stderr)
        return EXIT.get(err.family, EXIT["engine"])
    except OSError as err:
        print(json.dumps({"error": {"family": "parse", "code": "io", "message": str(err)}}),
              file=sys.stderr)
        return EXIT["parse"]


if __name__ == "__main__":
    sys.exit(main())
