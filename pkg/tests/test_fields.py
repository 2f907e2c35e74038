import itertools

import pytest
from hypothesis import given, strategies as st

from tmodule_lab.fields import GF, FieldError, FqElem, fq_arith, first_irreducible, is_irreducible_mod_p
from tmodule_lab.ratfunc import RatFunc, frobenius
from tmodule_lab.parsing import parse_ratfunc

from conftest import FIELDS, ratfuncs


def test_f4_multiplication_by_hand():
    k = GF(2, 2, (1, 1, 1))  # x^2 + x + 1
    x = k.from_digits([0, 1])
    assert k.mul(x, x) == k.from_digits([1, 1])


def test_identity_and_char_two():
    k = GF(2, 3)
    for a in range(k.q):
        assert k.mul(a, 1) == a
        assert k.add(a, a) == 0


@pytest.mark.parametrize("ctx", FIELDS, ids=str)
def test_field_axioms_exhaustive(ctx):
    q = ctx.q
    for a in range(q):
        assert ctx.add(a, ctx.neg(a)) == 0
        if a:
            assert ctx.mul(a, ctx.inv(a)) == 1
            assert ctx.pow(a, q - 1) == 1
        assert ctx.frob(a, ctx.m) == a
    for a, b in itertools.product(range(q), repeat=2):
        assert ctx.mul(a, b) == ctx.mul(b, a)
        assert ctx.frob(ctx.add(a, b), 1) == ctx.add(ctx.frob(a, 1), ctx.frob(b, 1))


def test_distributivity_f9():
    k = GF(3, 2)
    for a, b, c in itertools.product(range(9), repeat=3):
        assert k.mul(a, k.add(b, c)) == k.add(k.mul(a, b), k.mul(a, c))


def test_fq_elem_ops():
    k = GF(5)
    a, b = FqElem(k, 3), FqElem(k, 4)
    assert fq_arith(a, b, "add").code == 2
    assert fq_arith(a, b, "mul").code == 2
    assert (fq_arith(a, b, "div") * b) == a
    with pytest.raises((ZeroDivisionError, FieldError, ValueError)):
        fq_arith(a, FqElem(k, 0), "div")


def test_bad_fields():
    with pytest.raises((FieldError, ValueError)):
        GF(4)
    with pytest.raises((FieldError, ValueError)):
        GF(2, 2, (1, 0, 1))  # x^2 + 1 = (x+1)^2


def test_first_irreducible():
    for p, m in [(2, 2), (2, 3), (3, 2), (5, 2)]:
        assert is_irreducible_mod_p(first_irreducible(p, m), p)


def test_frobenius_examples():
    k2, k3 = GF(2), GF(3)
    assert frobenius(parse_ratfunc(k2, "T"), 1) == parse_ratfunc(k2, "T^2")
    assert frobenius(parse_ratfunc(k3, "T+1"), 1) == parse_ratfunc(k3, "T^3+1")
    assert frobenius(parse_ratfunc(k2, "1/T"), 2) == parse_ratfunc(k2, "1/T^4")


@given(ratfuncs(GF(3), nonzero=True))
def test_frobenius_equals_power(a):
    assert frobenius(a, 1) == a ** 3
    direct = RatFunc(a.num ** 3, a.den ** 3)
    assert frobenius(a, 1) == direct


@given(ratfuncs(GF(2, 2)))
def test_frobenius_is_additive_over_f4(a):
    b = RatFunc.T(a.ctx) + RatFunc.const(a.ctx, 2)
    assert frobenius(a + b, 1) == frobenius(a, 1) + frobenius(b, 1)
