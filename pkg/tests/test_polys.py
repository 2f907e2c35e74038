import itertools

import pytest
from hypothesis import given

from tmodule_lab.fields import GF
from tmodule_lab.polys import (
    FqPoly, TPoly, irreducibles, is_irreducible, monics, poly_factor, poly_gcd, poly_lcm, poly_xgcd,
)
from tmodule_lab.parsing import parse_poly

from conftest import polys


def P(ctx, s):
    return parse_poly(ctx, s)


def test_gcd_examples():
    k3, k2 = GF(3), GF(2)
    assert poly_gcd(P(k3, "T^2-1"), P(k3, "T-1")) == P(k3, "T-1")
    f = P(k3, "T^5+2*T+1")
    assert poly_gcd(f, FqPoly.one(k3)).is_one()
    assert poly_gcd(P(k2, "T^2+T"), P(k2, "T^2")) == P(k2, "T")


def test_factor_examples():
    k2, k3 = GF(2), GF(3)
    assert poly_factor(P(k2, "T^2+1")) == [(P(k2, "T+1"), 2)]
    f = P(k2, "T^3+T+1")
    assert poly_factor(f) == [(f, 1)]
    got = poly_factor(P(k3, "T^3-T"))
    assert sorted((str(g), m) for g, m in got) == [("T", 1), ("T+1", 1), ("T+2", 1)]


def _recombine(ctx, f, factors):
    acc = FqPoly.constant(ctx, f.lc())
    for g, m in factors:
        assert g.is_monic()
        assert is_irreducible(g)
        acc = acc * g ** m
    return acc


@pytest.mark.parametrize("p,top", [(2, 8), (3, 8)])
def test_factor_recombines_exhaustive(p, top):
    # every monic polynomial of degree <= top; non-monic inputs only differ by a unit
    ctx = GF(p)
    for deg in range(1, top + 1):
        for f in monics(ctx, deg):
            assert _recombine(ctx, f, poly_factor(f)) == f


def test_irreducible_counts():
    # Gauss: number of monic irreducibles of degree n over F_q
    def mobius(n):
        out, k = 1, 2
        while k * k <= n:
            if n % k == 0:
                n //= k
                if n % k == 0:
                    return 0
                out = -out
            k += 1
        return -out if n > 1 else out

    def gauss(q, n):
        return sum(mobius(n // d) * q ** d for d in range(1, n + 1) if n % d == 0) // n

    for p, n in [(2, 1), (2, 4), (2, 6), (3, 3), (5, 2), (4, 2)]:
        ctx = GF(2, 2) if p == 4 else GF(p)
        assert len(irreducibles(ctx, n)) == gauss(ctx.q, n)


@given(polys(GF(3), 6), polys(GF(3), 6, nonzero=True))
def test_divmod(a, b):
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree() < b.degree()


@given(polys(GF(2, 2), 5, nonzero=True), polys(GF(2, 2), 5, nonzero=True))
def test_xgcd_and_lcm(a, b):
    d, s, t = poly_xgcd(a, b)
    assert s * a + t * b == d
    assert d == poly_gcd(a, b)
    assert (a % d).is_zero() and (b % d).is_zero()
    assert poly_lcm(a, b) * d == (a * b).monic()


@given(polys(GF(5), 6), polys(GF(5), 6), polys(GF(5), 6))
def test_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == FqPoly.zero(a.ctx)


@given(polys(GF(3), 6))
def test_frobenius_poly(a):
    assert a.frobenius(1) == a ** 3


def test_sparse_high_degree():
    ctx = GF(2)
    f = FqPoly(ctx, {2 ** 40: 1, 1: 1})
    g = f * f
    assert g.degree() == 2 ** 41 and g.coeff(2) == 1 and len(g.terms) == 2


def test_tpoly_prints_in_t():
    b = TPoly.from_dense(GF(2), [0, 1, 1])
    assert "t" in str(b)
