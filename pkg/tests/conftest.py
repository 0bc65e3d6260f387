from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from galinv.exact import CR, Matrix, VPoly
from galinv.galilei import GalileiElement, SpinorRep

settings.register_profile(
    "galinv", max_examples=25, deadline=None,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("galinv")

rationals = st.fractions(min_value=-6, max_value=6, max_denominator=7)
nonzero_rationals = rationals.filter(bool)
crs = st.builds(CR, rationals, rationals)
nonzero_crs = crs.filter(bool)
small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def quaternions(draw):
    q = draw(st.tuples(small_ints, small_ints, small_ints, small_ints).filter(any))
    return q


@st.composite
def spinor_reps(draw, ncomp=2):
    return SpinorRep.from_quaternion(*draw(quaternions()), ncomp=ncomp)


@st.composite
def rotations(draw):
    return draw(spinor_reps()).rotation()


vectors = st.tuples(rationals, rationals, rationals)


@st.composite
def galilei_elements(draw):
    return GalileiElement(R=draw(rotations()), v=draw(vectors), a=draw(vectors),
                          b=draw(rationals))


@st.composite
def matrices(draw, n=2, m=None):
    m = n if m is None else m
    return Matrix([[draw(crs) for _ in range(m)] for _ in range(n)])


@st.composite
def vpolys(draw, nvars=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, 2)) for _ in range(nvars))
        terms[mono] = draw(crs)
    return VPoly(terms)


@pytest.fixture(scope="session")
def boost_gens4():
    from galinv.engine import calibrate_boost
    return calibrate_boost(4)["generators"]


def pytest_sessionstart(session):
    import time
    session.config._galinv_start = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    import sys
    import time
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    start = getattr(config, "_galinv_start", None)
    if start is not None:
        elapsed = time.perf_counter() - start
        terminalreporter.write_line(
            f"session wall time: {elapsed:.1f}s (limit 60s) {'PASS' if elapsed < 60 else 'FAIL'}")
