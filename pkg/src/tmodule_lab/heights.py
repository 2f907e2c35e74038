"""Places of F_q(T), valuations, and the affine logarithmic Weil height.

Heights are exact integers in units of log q: a place of residue degree
f contributes f times its pole order. Multiply by ``math.log(q)`` only
when reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .polys import FqPoly, is_irreducible, poly_factor, poly_lcm
from .ratfunc import RatFunc

INF = math.inf


@dataclass(frozen=True)
class Place:
    """A closed point of P^1: a monic irreducible ``poly``, or infinity (``poly=None``)."""

    poly: FqPoly | None = None

    def __post_init__(self):
        if self.poly is not None:
            if not self.poly.is_monic() or not is_irreducible(self.poly):
                raise ValueError(f"{self.poly} is not monic irreducible")

    @classmethod
    def infinite(cls):
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def residue_degree(self) -> int:
        return 1 if self.poly is None else self.poly.degree()

    def residue_field_size(self, q: int) -> int:
        return q ** self.residue_degree

    def __str__(self):
        return "inf" if self.poly is None else f"({self.poly})"


def _ord_poly(f: FqPoly, g: FqPoly) -> int:
    if f.is_zero():
        return INF
    if g.terms == {1: 1}:
        return f.low_degree()
    n = 0
    while True:
        q, r = f.divmod(g)
        if r:
            return n
        f = q
        n += 1


def valuation(a: RatFunc, v: Place):
    """ord_v(a); the zero element gives ``INF``."""
    if a.is_zero():
        return INF
    if v.is_infinite:
        return a.den.degree() - a.num.degree()
    return _ord_poly(a.num, v.poly) - _ord_poly(a.den, v.poly)


def height(a: RatFunc) -> int:
    return height_tuple([a])


def height_tuple(values) -> int:
    """h_K of a tuple, via lcm of denominators plus the pole order at infinity."""
    values = list(values)
    if not values:
        raise ValueError("height of an empty tuple")
    ctx = values[0].ctx
    den = FqPoly.one(ctx)
    top = 0
    for a in values:
        if a.is_zero():
            continue
        if not a.den.is_one():
            den = poly_lcm(den, a.den)
        top = max(top, a.num.degree() - a.den.degree())
    return den.degree() + top


def places_of(values):
    """Places where some entry has a zero or a pole, plus infinity, sorted."""
    seen = {}
    for a in values:
        if a.is_zero():
            continue
        for f in (a.num, a.den):
            if f.degree() >= 1:
                for g, _ in poly_factor(f):
                    seen[g] = True
    places = [Place(g) for g in sorted(seen, key=lambda g: g.sort_key())]
    places.append(Place.infinite())
    return places


def height_tuple_slow(values) -> int:
    """-sum_v min_j ord_v^-(a_j) deg(v), summing place by place after factoring."""
    values = list(values)
    if not values:
        raise ValueError("height of an empty tuple")
    total = 0
    for v in places_of(values):
        worst = 0
        for a in values:
            o = valuation(a, v)
            if o < worst:
                worst = o
        total += -worst * v.residue_degree
    return total


def height_poly(G) -> int:
    """Height of a multivariate polynomial: the height of its coefficient tuple."""
    coeffs = list(G.coefficients())
    if not coeffs:
        raise ValueError("height of the zero polynomial")
    return height_tuple(coeffs)


def product_formula_terms(a: RatFunc):
    """List of (place, ord_v(a), deg v) over the support of div(a) and infinity."""
    if a.is_zero():
        raise ValueError("product formula needs a nonzero element")
    return [(v, valuation(a, v), v.residue_degree) for v in places_of([a])]


def product_formula_check(a: RatFunc) -> bool:
    """Whether sum_v ord_v(a) deg(v) == 0."""
    return sum(o * f for _, o, f in product_formula_terms(a)) == 0


def in_log_units(h: int, q: int) -> float:
    return h * math.log(q)
