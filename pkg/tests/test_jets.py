import pytest
from hypothesis import given, strategies as st

from tmodule_lab.fields import GF
from tmodule_lab.jets import Jet, PrecisionLost
from tmodule_lab.polys import FqPoly

from conftest import polys

K3 = GF(3)


def top(f, k):
    """The coefficients of the top k exponents of f."""
    d = f.degree()
    return [f.coeff(e) for e in range(d, d - k, -1) if e >= 0]


@given(polys(K3, 30), polys(K3, 30), st.integers(3, 12))
def test_mul_matches_exact_top_window(a, b, w):
    ja, jb = Jet.from_poly(a, w), Jet.from_poly(b, w)
    prod = a * b
    jp = ja * jb
    if prod.is_zero():
        assert jp.is_zero()
        return
    assert jp.degree() == prod.degree()
    known = len(jp.coeffs)
    assert jp.coeffs == top(prod, known)


@given(polys(K3, 20), st.integers(1, 3), st.integers(2, 8))
def test_frobenius_matches_exact(a, k, w):
    ja = Jet.from_poly(a, w).frobenius(k)
    fa = a.frobenius(k)
    assert ja.degree() == fa.degree()
    assert ja.coeffs == top(fa, len(ja.coeffs))


@given(polys(K3, 20), polys(K3, 20), st.integers(2, 10))
def test_add_is_certified_or_raises(a, b, w):
    s = Jet.from_poly(a, w) + Jet.from_poly(b, w)
    exact = a + b
    try:
        deg = s.degree()
    except PrecisionLost:
        return
    assert deg == exact.degree()
    if deg >= 0:
        assert s.coeffs == top(exact, len(s.coeffs))


def test_cancellation_raises():
    a = FqPoly(K3, {20: 1, 3: 1})
    b = FqPoly(K3, {20: 2})
    s = Jet.from_poly(a, 4) + Jet.from_poly(b, 4)
    with pytest.raises(PrecisionLost):
        s.degree()
    with pytest.raises(PrecisionLost):
        s.to_poly()


def test_exact_roundtrip():
    a = FqPoly(K3, {5: 2, 0: 1})
    assert Jet.from_poly(a, 48).to_poly() == a
    assert Jet.from_poly(a, 48).height() == 5


def test_height_bounds_after_cancellation():
    a = FqPoly(K3, {20: 1, 3: 1})
    b = FqPoly(K3, {20: 2})
    s = Jet.from_poly(a, 4) + Jet.from_poly(b, 4)
    lo, hi = s.height_bounds()
    assert lo == 0 and hi >= 3 and hi < 20
    assert Jet.from_poly(a, 4).height_bounds() == (20, 20)
    assert Jet.zero(K3).height_bounds() == (0, 0)
