import sys
from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from affsusp.derivation import Derivation
from affsusp.polyring import Polynomial, parse_poly
from affsusp.tower import SuspensionTower, TowerPoint, suspend

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

VARS = ["x", "y", "z"]

small_ints = st.integers(min_value=-20, max_value=20)
rationals = st.builds(Fraction, small_ints, st.integers(min_value=1, max_value=20))
nonzero_rationals = rationals.filter(lambda q: q != 0)


@st.composite
def monomials(draw, variables=VARS, max_exp=3):
    exps = draw(st.lists(st.integers(0, max_exp), min_size=len(variables), max_size=len(variables)))
    return tuple((v, e) for v, e in zip(variables, exps) if e)


@st.composite
def polynomials(draw, variables=VARS, max_terms=4, max_exp=3):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        m = draw(monomials(variables, max_exp))
        terms[m] = terms.get(m, Fraction(0)) + draw(rationals)
    return Polynomial(terms)


@st.composite
def points(draw, variables=VARS):
    return {v: draw(rationals) for v in variables}


@st.composite
def triangular_derivations(draw, variables=VARS):
    """Nilpotent by construction: each variable's image uses only later variables."""
    images = {}
    for i, v in enumerate(variables):
        rest = variables[i + 1:]
        images[v] = draw(polynomials(rest, max_terms=3, max_exp=2)) if rest else Polynomial()
    return Derivation(images, "triangular")


def parabola_tower():
    """uv = x + y^2 over the plane."""
    return suspend(SuspensionTower.affine(["x", "y"]), parse_poly("x + y^2"), "u", "v")


def depth_two_tower():
    t = suspend(SuspensionTower.affine(["x", "y"]), parse_poly("x + y^2"), "u1", "v1")
    return suspend(t, parse_poly("u1"), "u2", "v2")


@st.composite
def parabola_points(draw, hyperbolic=False):
    """Points of uv = x + y^2: pick y, u, v freely and solve for x."""
    y, u, v = draw(rationals), draw(rationals), draw(rationals)
    if hyperbolic:
        u, v = u or Fraction(1), v or Fraction(1)
    return TowerPoint({"x": u * v - y * y, "y": y, "u": u, "v": v})


@st.composite
def depth_two_points(draw, hyperbolic=False):
    y, u1, v1, u2 = draw(rationals), draw(rationals), draw(rationals), draw(nonzero_rationals)
    if hyperbolic:
        u1, v1 = u1 or Fraction(1), v1 or Fraction(1)
    return TowerPoint({"x": u1 * v1 - y * y, "y": y, "u1": u1, "v1": v1, "u2": u2, "v2": u1 / u2})


@pytest.fixture
def parabola():
    return parabola_tower()


@pytest.fixture
def depth_two():
    return depth_two_tower()


def pytest_terminal_summary(terminalreporter):
    """Repeat one pass/fail line per acceptance criterion."""
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    outcomes = {}
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            name = rep.nodeid.rsplit("::", 1)[-1]
            if name.startswith("test_criterion_") and rep.when == "call":
                outcomes[int(name.split("_")[2])] = key
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(outcomes):
        line = (results or {}).get(n)
        if line is None:
            line = f"criterion {n}: {'PASS' if outcomes[n] == 'passed' else 'FAIL'}"
        terminalreporter.write_line(line)
