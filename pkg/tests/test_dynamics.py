import random

import pytest

from tmodule_lab.dynamics import (
    NotIntegralError, arithmetic_degree, detect_progression, dynamic_degree, orbit,
    preperiodicity_probe, reduce_and_shift, restricted_degree, restupper_window,
    tau_degree_sequence, truncbound_check,
)
from tmodule_lab.fields import GF
from tmodule_lab.heights import Place, height_tuple, valuation
from tmodule_lab.ore import TwistedOperator, evaluate, iterate
from tmodule_lab.parsing import parse_poly, parse_ratfunc
from tmodule_lab.polys import monics
from tmodule_lab.presets import carlitz, carlitz_tensor, diagonal, random_module
from tmodule_lab.ratfunc import RatFunc

K2, K3 = GF(2), GF(3)


def R(ctx, s):
    return parse_ratfunc(ctx, s)


def pt(ctx, *xs):
    return tuple(R(ctx, x) for x in xs)


def test_orbit_examples():
    assert orbit(carlitz(3), pt(K3, "0"), 3) == [pt(K3, "0")] * 4
    assert orbit(carlitz(3), pt(K3, "1"), 2) == [pt(K3, "1"), pt(K3, "T+1"), pt(K3, "T^3+T^2+T+1")]
    assert orbit(carlitz(2), pt(K2, "T"), 1) == [pt(K2, "T"), pt(K2, "0")]
    with pytest.raises(ValueError):
        orbit(carlitz(2), pt(K2, "1", "1"), 1)


@pytest.mark.parametrize("seed", range(6))
def test_orbit_agrees_with_symbolic_iterates(seed):
    F, P, _ = random_module(2 + seed % 2, 1 + seed % 3, 1 + seed % 2, seed)
    pts = orbit(F, P, 6)
    for n in range(7):
        assert pts[n] == evaluate(iterate(F, n), P)


def test_detect_progression():
    assert detect_progression([0, 1, 2, 3, 4, 5]) == (1, 1, 0)
    assert detect_progression([0, 1, 1, 2, 2, 3, 3, 4]) == (1, 2, 0)
    assert detect_progression([5, 0, 1, 2, 3, 4, 5]) == (1, 1, 1)
    assert detect_progression([0, 1, 3, 7]) is None


def test_dynamic_degree_examples():
    for p in (2, 3, 5):
        rep = dynamic_degree(carlitz(p), 8)
        assert rep.exact_rate == 1 and rep.delta == pytest.approx(p)
        assert rep.tau_degrees() == list(range(9))
    rep = dynamic_degree(carlitz_tensor(2, 2), 12)
    assert str(rep.exact_rate) == "1/2"
    assert rep.delta == pytest.approx(2 ** 0.5)
    A0 = TwistedOperator(K3, [[[R(K3, "T"), R(K3, "1")], [R(K3, "0"), R(K3, "2")]]])
    rep = dynamic_degree(A0, 6)
    assert rep.exact_rate == 0 and rep.delta == 1


def test_exact_rate_reproduces_further_iterates():
    F = carlitz_tensor(3, 3)
    rep = dynamic_degree(F, 12)
    assert str(rep.exact_rate) == "1/3"
    t = tau_degree_sequence(F, 18)
    s, period, n0 = rep.exact_rate.numerator, rep.rate_period, rep.rate_start
    for n in range(n0, 18 - period + 1):
        assert t[n + period] - t[n] == s * period // rep.exact_rate.denominator


def test_restricted_degree_on_tensor():
    F = carlitz_tensor(2, 2)
    lam = TwistedOperator(K2, [[[RatFunc.one(K2), RatFunc.zero(K2)]]])
    rep = restricted_degree(F, lam, 12)
    assert str(rep.exact_rate) == "1/2"


def test_arithmetic_degree_examples():
    rep = arithmetic_degree(carlitz(3), pt(K3, "1"), N_max=6)
    assert rep.heights()[1:4] == [1, 3, 9]
    assert rep.restupper_ok
    assert rep.canonical_proxy[3] == pytest.approx(9 / 27)
    rep = arithmetic_degree(carlitz(2), pt(K2, "T^2"), N_max=6)
    assert rep.heights()[:4] == [2, 4, 8, 16]
    assert rep.heights()[6] ** (1 / 6) == pytest.approx(2 * 2 ** (1 / 6))
    rep = arithmetic_degree(carlitz(2), pt(K2, "T"), N_max=5)
    assert rep.heights() == [1, 0, 0, 0, 0, 0] and rep.alpha_estimate() == 1.0


def test_arithmetic_degree_handles_non_integral_input():
    F = TwistedOperator(K3, [[[R(K3, "1/T")]], [[R(K3, "1")]]])
    rep = arithmetic_degree(F, pt(K3, "T+1"), N_max=5)
    assert rep.restupper_ok
    assert rep.exact_rate == 1


@pytest.mark.parametrize("seed", range(6))
def test_restupper_window_random(seed):
    F, P, lam = random_module(2 + seed % 2, 1 + seed % 3, 1 + seed % 2, seed)
    rep = arithmetic_degree(F, P, lam, N_max=10)
    assert rep.restupper_ok
    assert restupper_window(rep, 8, 0.25) == []


def test_truncbound_examples():
    res = truncbound_check(carlitz(2), 8)
    assert res.ok and res.C == 1 and res.margin <= 1
    res = truncbound_check(diagonal(2, 4), 6)
    assert res.ok and res.C == 0 and res.margin == 0
    res = truncbound_check(carlitz_tensor(2, 2), 10)
    assert res.ok and res.margin <= 1
    with pytest.raises(ValueError):
        truncbound_check(carlitz(2), 3, s=2.0, s_plus=1.5)


def test_reduce_examples():
    v = Place(parse_poly(K2, "T"))
    rep = reduce_and_shift(carlitz(2), pt(K2, "1"), v)
    assert (rep.s1, rep.s2) == (0, 1) and rep.Q == pt(K2, "T")
    rep = reduce_and_shift(carlitz(2), pt(K2, "T^2"), v)
    assert (rep.s1, rep.s2) == (0, 1)
    with pytest.raises(NotIntegralError):
        reduce_and_shift(carlitz(2), pt(K2, "1/T"), v)


@pytest.mark.parametrize("p,d", [(2, 2), (3, 1)])
def test_reduce_pigeonhole_bound(p, d):
    # Q is computed exactly, so s2 (up to q^d + 1) has to stay small
    ctx = GF(p)
    F, P, _ = random_module(p, d, 1, 3)
    for deg in (1, 2):
        for f in monics(ctx, deg):
            try:
                v = Place(f)
            except ValueError:
                continue
            try:
                rep = reduce_and_shift(F, P, v)
            except NotIntegralError:
                continue
            assert rep.s1 < rep.s2 <= (p ** deg) ** d + 1
            assert all(valuation(x, v) >= 1 for x in rep.Q)


def test_preperiodicity_examples():
    res = preperiodicity_probe(carlitz(3), pt(K3, "0"), 5, 100)
    assert res.status == "preperiodic" and res.period == 1
    res = preperiodicity_probe(carlitz(2), pt(K2, "T"), 5, 100)
    assert res.status == "preperiodic" and res.preperiod == 1
    res = preperiodicity_probe(carlitz(3), pt(K3, "1"), 10, 20)
    assert res.status == "escaping" and res.monotone and res.heights[:4] == [0, 1, 3, 9]


def test_report_serialization():
    rep = arithmetic_degree(carlitz(3), pt(K3, "1"), N_max=3)
    assert rep.to_csv().splitlines()[1] == "n,tdeg,height"
    assert '"exact_rate": "1"' in rep.to_json()


def test_deep_cancellation_gives_certified_upper_bounds():
    # lambda = (T, T) over F_2 with a swap as leading matrix: the top parts of the
    # two coordinates agree, so h(lambda(F^n P)) falls far below h(F^n P)
    F, P, lam = random_module(2, 2, 2, 4)
    rep = arithmetic_degree(F, P, lam, N_max=7)
    assert rep.upper_only and rep.restupper_ok
    pts = orbit(F, P, 7)
    for n, _, h in rep.rows:
        true = height_tuple(evaluate(lam, pts[n]))
        if n in rep.upper_only:
            assert true <= h
        else:
            assert true == h
    assert any("upper bounds" in note for note in rep.notes)
