import pytest
from hypothesis import given

from tmodule_lab.fields import GF
from tmodule_lab.parsing import ParseError, parse_mpoly, parse_poly, parse_ratfunc
from tmodule_lab.polys import FqPoly
from tmodule_lab.ratfunc import RatFunc

from conftest import ratfuncs

K3 = GF(3)


@given(ratfuncs(K3), ratfuncs(K3))
def test_add_sub_roundtrip_is_canonical(a, b):
    c = a + b - b
    assert c == a
    assert c.num.terms == a.num.terms and c.den.terms == a.den.terms


@given(ratfuncs(K3, nonzero=True))
def test_canonical_form(a):
    assert a.den.is_monic()
    from tmodule_lab.polys import poly_gcd
    assert poly_gcd(a.num, a.den).is_one()
    assert a * a.inverse() == RatFunc.one(K3)


@given(ratfuncs(GF(2, 2)), ratfuncs(GF(2, 2)), ratfuncs(GF(2, 2)))
def test_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        RatFunc(FqPoly.one(K3), FqPoly.zero(K3))
    with pytest.raises(ZeroDivisionError):
        RatFunc.zero(K3).inverse()


@pytest.mark.parametrize("text,expect", [
    ("T^3+2*T+1", "T^3+2*T+1"),
    ("(T+1)/T^2", "(T+1)/(T^2)"),
    ("-T", "2*T"),
    ("T^-1", "1/(T)"),
    ("4", "1"),
])
def test_parse_and_print(text, expect):
    a = parse_ratfunc(K3, text)
    assert str(a) == expect
    assert parse_ratfunc(K3, str(a)) == a


def test_tuple_literal_in_f4():
    k = GF(2, 2)
    a = parse_ratfunc(k, "(0,1)*T + (1,1)")
    assert a.num.coeff(1) == k.from_digits([0, 1])
    assert a.num.coeff(0) == k.from_digits([1, 1])
    with pytest.raises(ParseError):
        parse_ratfunc(k, "(1,1,1)")


@pytest.mark.parametrize("text,col", [("T+*2", 3), ("T^", 3), ("(T+1", 5), ("T $", 3), ("1/0", 3)])
def test_parse_errors_report_column(text, col):
    with pytest.raises(ParseError) as info:
        parse_ratfunc(K3, text)
    assert f"column {col}" in str(info.value)


def test_parse_poly_rejects_fractions():
    with pytest.raises(ParseError):
        parse_poly(K3, "1/T")


def test_parse_mpoly():
    G = parse_mpoly(K3, "T*x1 + x1^3 - x2", 2)
    assert G.coefficient((3, 0)).is_one()
    assert G.coefficient((1, 0)) == RatFunc.T(K3)
    assert G.coefficient((0, 1)) == RatFunc.from_int(K3, -1)
    with pytest.raises(ParseError):
        parse_mpoly(K3, "x1/x2", 2)
    with pytest.raises(ParseError):
        parse_mpoly(K3, "x3", 2)
