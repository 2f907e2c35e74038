import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from tmodule_lab.fields import GF
from tmodule_lab.polys import FqPoly
from tmodule_lab.ratfunc import RatFunc

settings.register_profile(
    "repro",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")

FIELDS = [GF(2), GF(3), GF(5), GF(2, 2), GF(3, 2)]


def polys(ctx, max_deg=5, nonzero=False):
    coeffs = st.lists(st.integers(0, ctx.q - 1), min_size=1, max_size=max_deg + 1)
    s = coeffs.map(lambda cs: FqPoly.from_dense(ctx, cs))
    if nonzero:
        s = s.filter(lambda f: not f.is_zero())
    return s


def ratfuncs(ctx, max_deg=4, nonzero=False):
    s = st.builds(lambda n, d: RatFunc(n, d), polys(ctx, max_deg), polys(ctx, max_deg, nonzero=True))
    if nonzero:
        s = s.filter(lambda a: not a.is_zero())
    return s


def rand_poly(rng, ctx, deg):
    return FqPoly(ctx, {e: rng.randrange(ctx.q) for e in range(deg + 1)})


def rand_ratfunc(rng, ctx, deg, nonzero=True):
    while True:
        num = rand_poly(rng, ctx, rng.randint(0, deg))
        den = rand_poly(rng, ctx, rng.randint(0, deg))
        if den.is_zero() or (nonzero and num.is_zero()):
            continue
        return RatFunc(num, den)


@pytest.fixture
def rng():
    return random.Random(12345)


# --- acceptance reporting ----------------------------------------------------

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else "FAIL"
        _ACCEPTANCE[number] = f"criterion {number:>2}: {status}  {title}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
