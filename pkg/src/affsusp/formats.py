"""JSON instance and certificate files.

Rationals are ``"p/q"`` strings (or integers written as strings), polynomials
are expression-grammar text in canonical print form.  No floats are accepted
anywhere: a JSON number that is not an integer is a format error.

Instance::

    {"format": "affsusp-instance", "version": 1,
     "geometry": {"kind": "affine", "base_vars": ["x", "y"]},
     "tower": [{"u": "u", "v": "v", "f": "x + y^2", "designated": "x"}],
     "sources": [{"x": "3", "y": "1", "u": "2", "v": "2"}],
     "targets": [{"x": "0", "y": "2", "u": "1", "v": "4"}],
     "options": {"nilpotency_cap": 64, "generic_cap": 10000}}

A mock instance uses ``{"kind": "mock", "var": "t", "dim": 2,
"components": {"Y": {"kind": "BoundedPositive", "lo": "1", "hi": "4"}},
"tokens": {"1": {"value": "2", "component": "Y"}}}`` and exactly one tower
level without ``f``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .config import ChoiceAlphaConfig, EngineOptions
from .derivation import AutomorphismScript, Derivation, FlowStep
from .errors import FormatError, ParseError, UnknownVariableError
from .geometry import MockGeometry, MockLift, MockMove, RangeDescriptor, RangeKind, TowerGeometry
from .polyring import Polynomial, format_poly, format_rational, parse_poly, parse_rational
from .tower import Side, SuspensionTower, TowerPoint, suspend
from .transit import LevelContext

INSTANCE_FORMAT = "affsusp-instance"
CERTIFICATE_FORMAT = "affsusp-certificate"
FLEX_FORMAT = "affsusp-flex-certificate"
VERSION = 1
CONVENTION = "leftmost-first"


def rat(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise FormatError(f"expected a rational string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if not isinstance(x, str):
        raise FormatError(f"expected a rational string, got {x!r}")
    return parse_rational(x)


def rat_text(x) -> str:
    return format_rational(Fraction(x))


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _check_header(obj, fmt: str):
    if not isinstance(obj, dict):
        raise FormatError("top level must be a JSON object")
    if obj.get("format") != fmt:
        raise FormatError(f"expected format {fmt!r}, got {obj.get('format')!r}")
    if obj.get("version") != VERSION:
        raise FormatError(f"unsupported version {obj.get('version')!r}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def loads(text: str):
    try:
        return json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as err:
        raise ParseError(f"malformed JSON: {err.msg}", err.pos) from None


def _reject_float(s):
    raise FormatError(f"floating-point literal {s} not allowed; use \"p/q\"")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=True) + "\n"


# -- instances -------------------------------------------------------------------

@dataclass
class Instance:
    raw: dict
    ctx: LevelContext
    sources: list
    targets: list
    options: EngineOptions
    tower: Optional[SuspensionTower] = None
    kind: str = "affine"
    points: list = field(default_factory=list)

    @property
    def digest(self) -> str:
        return digest(self.raw)

    @property
    def variables(self) -> list:
        return self.ctx.variables


def _options(raw: dict) -> EngineOptions:
    raw = raw or {}
    alpha = ChoiceAlphaConfig(
        epsilon=rat(raw["epsilon"]) if raw.get("epsilon") is not None else None,
        epsilon_fraction=rat(raw.get("epsilon_fraction", "1/4")),
        max_iterations=int(raw.get("max_iterations", 10_000)),
    )
    return EngineOptions(
        nilpotency_cap=int(raw.get("nilpotency_cap", 64)),
        generic_cap=int(raw.get("generic_cap", 10_000)),
        alpha=alpha,
    )


def _range(raw: dict) -> RangeDescriptor:
    kind_name = _require(raw, "kind", "range")
    try:
        kind = RangeKind[_snake(kind_name)]
    except KeyError:
        raise FormatError(f"unknown range kind {kind_name!r}") from None
    lo = rat(raw["lo"]) if "lo" in raw else None
    hi = rat(raw["hi"]) if "hi" in raw else None
    return RangeDescriptor(kind, lo, hi)


def _snake(name: str) -> str:
    out = ""
    for ch in name:
        if ch.isupper() and out:
            out += "_"
        out += ch.upper()
    return out


def _point(raw, variables, where: str) -> TowerPoint:
    if not isinstance(raw, dict):
        raise FormatError(f"{where}: a point must be an object")
    stray = set(raw) - set(variables)
    if stray:
        raise UnknownVariableError(f"{where}: unknown variables {sorted(stray)}")
    missing = [v for v in variables if v not in raw]
    if missing:
        raise FormatError(f"{where}: missing coordinates {missing}")
    return TowerPoint({v: rat(raw[v]) for v in variables})


def parse_point_text(text: str, variables) -> TowerPoint:
    """``"x=1, y=1, u=1, v=2"`` -> point."""
    coords = {}
    for part in text.split(","):
        if "=" not in part:
            raise FormatError(f"expected name=value, got {part.strip()!r}")
        k, val = part.split("=", 1)
        coords[k.strip()] = val.strip()
    return _point(coords, variables, "point")


def load_instance(obj, overrides: Optional[dict] = None) -> Instance:
    """Build an instance; ``overrides`` replace option fields without
    changing the instance digest."""
    if isinstance(obj, str):
        obj = loads(obj)
    _check_header(obj, INSTANCE_FORMAT)
    opts = dict(obj.get("options") or {})
    opts.update({k: v for k, v in (overrides or {}).items() if v is not None})
    options = _options(opts)
    geo = _require(obj, "geometry", "instance")
    levels = _require(obj, "tower", "instance")
    if not isinstance(levels, list):
        raise FormatError("tower must be a list of levels")
    kind = _require(geo, "kind", "geometry")
    tower = None
    if kind == "affine":
        tower = SuspensionTower.affine(_require(geo, "base_vars", "geometry"))
        designated = {}
        if not levels:
            raise FormatError("tower needs at least one level")
        for k, lv in enumerate(levels, start=1):
            f = parse_poly(_require(lv, "f", f"level {k}"), vars=tower.variables)
            tower = suspend(tower, f, _require(lv, "u", f"level {k}"), _require(lv, "v", f"level {k}"))
            if lv.get("designated"):
                designated[k] = lv["designated"]
        ctx = TowerGeometry(tower, designated, options).top_level()
    elif kind == "mock":
        comps = {name: _range(r) for name, r in _require(geo, "components", "geometry").items()}
        tokens = {}
        for tok, entry in _require(geo, "tokens", "geometry").items():
            tokens[int(tok)] = (rat(_require(entry, "value", f"token {tok}")),
                                _require(entry, "component", f"token {tok}"))
        g = MockGeometry(comps, tokens, int(geo.get("dim", 2)), geo.get("var", "t"))
        if len(levels) != 1:
            raise FormatError("a mock instance has exactly one level")
        lv = levels[0]
        ctx = LevelContext(g, None, _require(lv, "u", "level 1"), _require(lv, "v", "level 1"),
                           1, options)
    else:
        raise FormatError(f"unknown geometry kind {kind!r}")
    variables = ctx.variables
    sources = [_point(p, variables, f"source {i}") for i, p in enumerate(obj.get("sources", []))]
    targets = [_point(p, variables, f"target {i}") for i, p in enumerate(obj.get("targets", []))]
    points = [_point(p, variables, f"point {i}") for i, p in enumerate(obj.get("points", []))]
    return Instance(obj, ctx, sources, targets, options, tower, kind, points)


def point_json(p, variables) -> dict:
    return {v: rat_text(p[v]) for v in variables}


def affine_instance(base_vars, levels, sources, targets, options=None) -> dict:
    """Build an affine instance dict; ``levels`` holds ``(u, v, f_text[, designated])``."""
    tower = []
    for lv in levels:
        entry = {"u": lv[0], "v": lv[1], "f": format_poly(parse_poly(lv[2])) if isinstance(lv[2], str)
                 else format_poly(lv[2])}
        if len(lv) > 3 and lv[3]:
            entry["designated"] = lv[3]
        tower.append(entry)
    variables = list(base_vars)
    for lv in levels:
        variables += [lv[0], lv[1]]
    out = {"format": INSTANCE_FORMAT, "version": VERSION,
           "geometry": {"kind": "affine", "base_vars": list(base_vars)},
           "tower": tower,
           "sources": [point_json(p, variables) for p in sources],
           "targets": [point_json(p, variables) for p in targets]}
    if options:
        out["options"] = options
    return out


def range_json(r: RangeDescriptor) -> dict:
    out = {"kind": "".join(w.capitalize() for w in r.kind.name.split("_"))}
    if r.lo is not None:
        out["lo"] = rat_text(r.lo)
    if r.hi is not None:
        out["hi"] = rat_text(r.hi)
    return out


def mock_instance(components, tokens, sources, targets, u="u", v="v", var="t", dim=2,
                  options=None) -> dict:
    variables = [var, u, v]
    out = {"format": INSTANCE_FORMAT, "version": VERSION,
           "geometry": {"kind": "mock", "var": var, "dim": dim,
                        "components": {k: range_json(r) for k, r in components.items()},
                        "tokens": {str(t): {"value": rat_text(val), "component": c}
                                   for t, (val, c) in sorted(tokens.items())}},
           "tower": [{"u": u, "v": v}],
           "sources": [point_json(p, variables) for p in sources],
           "targets": [point_json(p, variables) for p in targets]}
    if options:
        out["options"] = options
    return out


# -- scripts ---------------------------------------------------------------------

def step_json(step, variables) -> dict:
    if isinstance(step, FlowStep):
        d = step.derivation
        return {"kind": "flow", "stage": step.stage, "time": rat_text(step.time),
                "derivation": {"label": d.label,
                               "images": {x: format_poly(d.images[x]) for x in variables
                                          if x in d.images}}}
    if isinstance(step, MockLift):
        return {"kind": "mock-lift", "stage": step.stage, "time": step.time,
                "side": step.side.value, "multiplier": format_poly(step.q),
                "u": step.u_var, "v": step.v_var,
                "mapping": [[a, b] for a, b in step.move.mapping]}
    if isinstance(step, MockMove):
        return {"kind": "mock-move", "stage": step.stage, "time": step.time,
                "mapping": [[a, b] for a, b in step.mapping]}
    raise TypeError(f"cannot serialise {type(step).__name__}")


def script_json(script: AutomorphismScript, variables) -> list:
    return [step_json(s, variables) for s in script.steps]


def load_step(raw: dict, variables, mock: Optional[MockGeometry], i: int):
    where = f"step {i}"
    kind = _require(raw, "kind", where)
    stage = raw.get("stage", "")
    if kind == "flow":
        d = _require(raw, "derivation", where)
        images = {}
        for x, text in _require(d, "images", where).items():
            if x not in variables:
                raise UnknownVariableError(f"{where}: unknown variable {x!r}")
            images[x] = parse_poly(text, vars=variables)
        for x in variables:
            images.setdefault(x, Polynomial())
        return FlowStep(Derivation(images, d.get("label", "")), rat(_require(raw, "time", where)), stage)
    if kind in ("mock-lift", "mock-move"):
        if mock is None:
            raise FormatError(f"{where}: mock step in a non-mock certificate")
        t = _require(raw, "time", where)
        if t not in (1, -1):
            raise FormatError(f"{where}: mock time must be 1 or -1")
        mapping = tuple(sorted((int(a), int(b)) for a, b in _require(raw, "mapping", where)))
        move = MockMove(mapping, mock, t, stage)
        if kind == "mock-move":
            return move
        side = Side(_require(raw, "side", where))
        q = parse_poly(_require(raw, "multiplier", where))
        return MockLift(move, q, side, _require(raw, "u", where), _require(raw, "v", where), stage)
    raise FormatError(f"{where}: unknown step kind {kind!r}")


def load_script(raw_steps, variables, mock=None) -> AutomorphismScript:
    if not isinstance(raw_steps, list):
        raise FormatError("steps must be a list")
    return AutomorphismScript(tuple(load_step(s, variables, mock, i) for i, s in enumerate(raw_steps)))


# -- certificates ----------------------------------------------------------------

def certificate_json(inst: Instance, script: AutomorphismScript, verification=None) -> dict:
    out = {"format": CERTIFICATE_FORMAT, "version": VERSION,
           "instance_digest": inst.digest,
           "convention": CONVENTION,
           "variables": inst.variables,
           "steps": script_json(script, inst.variables)}
    if isinstance(inst.ctx.geometry, MockGeometry):
        g = inst.ctx.geometry
        out["tokens"] = {str(t): {"value": rat_text(val), "component": c}
                         for t, (val, c) in sorted(g.tokens.items())}
    if verification is not None:
        out["verification"] = verification
    return out


@dataclass
class Certificate:
    raw: dict
    instance_digest: str
    variables: list
    script: AutomorphismScript


def load_certificate(obj, inst: Instance) -> Certificate:
    if isinstance(obj, str):
        obj = loads(obj)
    _check_header(obj, CERTIFICATE_FORMAT)
    if obj.get("convention", CONVENTION) != CONVENTION:
        raise FormatError(f"unsupported convention {obj.get('convention')!r}")
    variables = _require(obj, "variables", "certificate")
    mock = inst.ctx.geometry if isinstance(inst.ctx.geometry, MockGeometry) else None
    if mock is not None:
        # tokens allocated while solving are needed to replay the script
        for tok, entry in obj.get("tokens", {}).items():
            tok = int(tok)
            if tok not in mock.tokens:
                mock._register(tok, rat(entry["value"]), entry["component"])
    script = load_script(_require(obj, "steps", "certificate"), variables, mock)
    return Certificate(obj, _require(obj, "instance_digest", "certificate"), variables, script)
