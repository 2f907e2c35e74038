"""Elements of K = F_q(T) in canonical reduced form."""

from __future__ import annotations

from .fields import FqCtx
from .polys import FqPoly, poly_gcd


class RatFunc:
    """num/den with den monic and gcd(num, den) = 1; zero is 0/1."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: FqPoly, den: FqPoly | None = None):
        ctx = num.ctx
        if den is None:
            den = FqPoly.one(ctx)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num, den = num, FqPoly.one(ctx)
        elif not den.is_one():
            g = poly_gcd(num, den)
            if not g.is_one():
                num, den = num.exact_div(g), den.exact_div(g)
            lc = den.lc()
            if lc != 1:
                inv = ctx.inv(lc)
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _raw(cls, num, den):
        obj = cls.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, ctx: FqCtx):
        return cls._raw(FqPoly.zero(ctx), FqPoly.one(ctx))

    @classmethod
    def one(cls, ctx: FqCtx):
        return cls._raw(FqPoly.one(ctx), FqPoly.one(ctx))

    @classmethod
    def const(cls, ctx: FqCtx, c: int):
        return cls._raw(FqPoly.constant(ctx, c), FqPoly.one(ctx))

    @classmethod
    def from_int(cls, ctx: FqCtx, n: int):
        return cls.const(ctx, ctx.from_int(n))

    @classmethod
    def T(cls, ctx: FqCtx):
        return cls._raw(FqPoly.monomial(ctx, 1), FqPoly.one(ctx))

    @property
    def ctx(self) -> FqCtx:
        return self.num.ctx

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.den.is_one() and self.num.is_constant()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, int):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, FqPoly):
            return RatFunc._raw(other, FqPoly.one(other.ctx))
        if isinstance(other, int):
            return RatFunc.from_int(self.ctx, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        a, b, c, d = self.num, self.den, o.num, o.den
        if b.is_one() and d.is_one():
            return RatFunc._raw(a + c, b)
        if b == d:
            return RatFunc(a + c, b)
        g = poly_gcd(b, d)
        if g.is_one():
            return RatFunc(a * d + c * b, b * d)
        bg, dg = b.exact_div(g), d.exact_div(g)
        num = a * dg + c * bg
        return RatFunc(num, b * dg)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RatFunc.zero(self.ctx)
        a, b, c, d = self.num, self.den, o.num, o.den
        if b.is_one() and d.is_one():
            return RatFunc._raw(a * c, b)
        g1 = poly_gcd(a, d) if not d.is_one() else None
        g2 = poly_gcd(c, b) if not b.is_one() else None
        if g1 is not None and not g1.is_one():
            a, d = a.exact_div(g1), d.exact_div(g1)
        if g2 is not None and not g2.is_one():
            c, b = c.exact_div(g2), b.exact_div(g2)
        num, den = a * c, b * d
        lc = den.lc()
        if lc != 1:
            inv = self.ctx.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        return RatFunc._raw(num, den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero in K")
        num, den = self.den, self.num
        inv = self.ctx.inv(den.lc())
        return RatFunc._raw(num.scale(inv), den.scale(inv))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc._raw(self.num ** e, self.den ** e)

    def scale(self, c: int) -> "RatFunc":
        """Multiply by a field code."""
        if c == 0:
            return RatFunc.zero(self.ctx)
        return RatFunc._raw(self.num.scale(c), self.den)

    def frobenius(self, k: int = 1) -> "RatFunc":
        """a^(p^k); numerator and denominator twist separately."""
        if k == 0:
            return self
        return RatFunc._raw(self.num.frobenius(k), self.den.frobenius(k))

    def degree(self) -> int:
        """deg num - deg den (minus the order at infinity); zero has no degree."""
        if self.num.is_zero():
            raise ValueError("degree of zero")
        return self.num.degree() - self.den.degree()

    def sort_key(self):
        return (self.den.sort_key(), self.num.sort_key())

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"


def frobenius(a: RatFunc, k: int) -> RatFunc:
    """a^(p^k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return a.frobenius(k)
