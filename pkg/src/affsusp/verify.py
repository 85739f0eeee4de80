"""Independent re-checking of automorphism scripts.

Checks, in order: the certificate belongs to the instance (digest), every
flow step kills every tower relation identically and is nilpotent within the
cap, the script maps each source to its target, and each step keeps a few
on-variety test points on the variety.  Test points go through one step at a
time: pushing them through a whole script makes their heights explode.  Mock steps skip the two polynomial checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .derivation import AutomorphismScript, FlowStep, nilpotency_order
from .errors import CapExceededError, SuspError
from .geometry import MockGeometry
from .polyring import Polynomial, evaluate, format_rational
from .tower import SuspensionTower, TowerPoint, check_point, failing_relations

CHECKS = ("digest", "relations", "nilpotency", "endpoints", "on-variety")


@dataclass
class Failure:
    check: str
    index: Optional[int]       # step index, or source index for endpoints
    message: str

    def as_json(self) -> dict:
        return {"check": self.check, "index": self.index, "message": self.message}


@dataclass
class Report:
    steps: int = 0
    checked: dict = field(default_factory=lambda: {c: 0 for c in CHECKS})
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_checks(self) -> list:
        return sorted({f.check for f in self.failures}, key=CHECKS.index)

    def summary(self) -> dict:
        return {"ok": self.ok, "steps": self.steps,
                "checked": dict(self.checked),
                "failures": [f.as_json() for f in self.failures]}

    def lines(self) -> list:
        out = []
        for c in CHECKS:
            bad = [f for f in self.failures if f.check == c]
            status = "FAIL" if bad else "ok"
            out.append(f"{c:<11} {status}  ({self.checked[c]} checked)")
            for f in bad:
                where = f" [{f.index}]" if f.index is not None else ""
                out.append(f"    {c}{where}: {f.message}")
        return out


def sample_points(tower: SuspensionTower, count: int, seed: int = 0) -> list:
    """Deterministic on-variety points: random base, random nonzero u per
    level, v solved from the relation."""
    rnd = random.Random(seed)
    pts = []
    for _ in range(count):
        coords = {x: Fraction(rnd.randint(-9, 9), rnd.randint(1, 5)) for x in tower.base_vars}
        for lv in tower.levels:
            u = Fraction(rnd.choice([-1, 1]) * rnd.randint(1, 9), rnd.randint(1, 5))
            coords[lv.u_var] = u
            coords[lv.v_var] = evaluate(lv.f, coords) / u
        pts.append(TowerPoint(coords))
    return pts


def run_script(script: AutomorphismScript, point, cap: int) -> TowerPoint:
    q = dict(point)
    for step in script.steps:
        q = step.act(q, cap) if isinstance(step, FlowStep) else step.act(q)
    return TowerPoint(q)


def verify_script(script: AutomorphismScript, sources, targets, variables,
                  tower: Optional[SuspensionTower] = None, cap: int = 64,
                  n_test_points: int = 3, expected_digest: Optional[str] = None,
                  actual_digest: Optional[str] = None) -> Report:
    rep = Report(steps=len(script))
    if expected_digest is not None:
        rep.checked["digest"] += 1
        if expected_digest != actual_digest:
            rep.failures.append(Failure("digest", None, "certificate was produced for another instance"))
    for i, step in enumerate(script.steps):
        if not isinstance(step, FlowStep) or tower is None:
            continue
        d = step.derivation
        rep.checked["relations"] += 1
        bad = failing_relations(d, tower)
        if bad:
            rep.failures.append(Failure("relations", i,
                                        f"step {i} ({step.stage}) breaks the relation of level(s) {bad}"))
        rep.checked["nilpotency"] += 1
        for x in variables:
            try:
                nilpotency_order(d, Polynomial.var(x), cap)
            except CapExceededError:
                rep.failures.append(Failure("nilpotency", i,
                                            f"step {i} ({step.stage}) not nilpotent on {x} within {cap}"))
                break
    for k, (s, t) in enumerate(zip(sources, targets)):
        rep.checked["endpoints"] += 1
        try:
            img = run_script(script, s, cap)
        except SuspError as err:
            rep.failures.append(Failure("endpoints", k, f"source {k}: {err}"))
            continue
        if any(img[x] != t[x] for x in variables):
            diff = ", ".join(f"{x}={format_rational(img[x])}" for x in variables if img[x] != t[x])
            rep.failures.append(Failure("endpoints", k, f"source {k} lands at {diff}, not on its target"))
    if tower is not None and tower.levels and n_test_points:
        pts = sample_points(tower, n_test_points)
        for i, step in enumerate(script.steps):
            if not isinstance(step, FlowStep):
                continue
            rep.checked["on-variety"] += 1
            for k, p in enumerate(pts):
                try:
                    check_point(tower, step.act(p, cap))
                except SuspError as err:
                    rep.failures.append(Failure("on-variety", i,
                                                f"step {i} moves test point {k} off: {err}"))
                    break
    return rep


def verify_instance(inst, script: AutomorphismScript, expected_digest: Optional[str] = None,
                    n_test_points: int = 3) -> Report:
    mock = isinstance(inst.ctx.geometry, MockGeometry)
    tower = None if mock else inst.ctx.tower
    return verify_script(script, inst.sources, inst.targets, inst.variables, tower,
                         inst.options.nilpotency_cap, 0 if mock else n_test_points,
                         expected_digest, inst.digest if expected_digest is not None else None)
