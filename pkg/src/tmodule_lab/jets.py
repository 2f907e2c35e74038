"""Leading-coefficient windows for elements of F_q[T].

A ``Jet`` keeps the coefficients of the top ``window`` exponents of a
polynomial, i.e. a truncated expansion at the infinite place, together
with the lowest exponent still known (``low``). Every exponent in
``[low, hi]`` is known exactly; everything below ``low`` is unknown.
A jet with ``low <= 0`` is the exact polynomial.

Frobenius multiplies exponents by p and so stretches the known range;
multiplication keeps the relative precision of the less precise factor;
only cancellation in sums loses information. Degrees read off a jet are
therefore certified, and a sum that cancels everything it knows raises
``PrecisionLost`` instead of guessing.
"""

from __future__ import annotations

from .fields import FqCtx
from .polys import FqPoly

DEFAULT_WINDOW = 48


class PrecisionLost(ArithmeticError):
    """A jet cannot decide its own degree or zeroness."""


class Jet:
    __slots__ = ("ctx", "hi", "coeffs", "low", "window")

    def __init__(self, ctx: FqCtx, hi: int, coeffs, low: int, window: int):
        # coeffs[k] is the coefficient of T^(hi - k); len(coeffs) == hi - low + 1
        self.ctx = ctx
        self.window = window
        coeffs = list(coeffs)
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        if k:
            coeffs = coeffs[k:]
            hi -= k
        if low <= 0:
            low = 0
            if hi < 0:
                coeffs = []
        if len(coeffs) > window:
            coeffs = coeffs[:window]
            low = hi - window + 1
        self.coeffs = coeffs
        self.hi = hi if coeffs else None
        self.low = low

    # --- construction -----------------------------------------------------

    @classmethod
    def from_poly(cls, f: FqPoly, window: int = DEFAULT_WINDOW) -> "Jet":
        if f.is_zero():
            return cls(f.ctx, -1, [], 0, window)
        hi = f.degree()
        lo = max(0, hi - window + 1)
        t = f.terms
        return cls(f.ctx, hi, [t.get(e, 0) for e in range(hi, lo - 1, -1)], lo, window)

    @classmethod
    def from_ratfunc(cls, a, window: int = DEFAULT_WINDOW) -> "Jet":
        if not a.is_poly():
            raise ValueError("jets represent polynomials only")
        return cls.from_poly(a.num, window)

    @classmethod
    def zero(cls, ctx, window=DEFAULT_WINDOW):
        return cls(ctx, -1, [], 0, window)

    # --- queries ----------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.low <= 0

    def is_zero(self) -> bool:
        if self.coeffs:
            return False
        if self.exact:
            return True
        raise PrecisionLost("cancellation exhausted the known coefficients")

    def degree(self) -> int:
        if self.coeffs:
            return self.hi
        if self.exact:
            return -1
        raise PrecisionLost("cancellation exhausted the known coefficients")

    def to_poly(self) -> FqPoly:
        if not self.exact:
            raise PrecisionLost("jet is truncated")
        if not self.coeffs:
            return FqPoly.zero(self.ctx)
        return FqPoly(self.ctx, {self.hi - k: c for k, c in enumerate(self.coeffs) if c})

    def __repr__(self):
        state = "exact" if self.exact else f"known down to T^{self.low}"
        return f"Jet(deg={self.hi}, {len(self.coeffs)} coeffs, {state})"

    # --- arithmetic -------------------------------------------------------

    def __add__(self, other: "Jet") -> "Jet":
        if not other.coeffs and other.exact:
            return self
        if not self.coeffs and self.exact:
            return other
        low = max(self.low, other.low)
        his = [j.hi for j in (self, other) if j.coeffs]
        if not his:
            return Jet(self.ctx, low - 1, [], low, self.window)
        hi = max(his)
        if hi < low:
            return Jet(self.ctx, low - 1, [], low, self.window)
        ctx = self.ctx
        n = hi - low + 1
        out = [0] * n
        first = True
        for j in (self, other):
            if not j.coeffs or j.hi < low:
                continue
            off = hi - j.hi
            part = j.coeffs[: j.hi - low + 1]
            if first:
                out[off:off + len(part)] = part
                first = False
            elif ctx.m == 1:
                p = ctx.p
                for idx, c in enumerate(part):
                    if c:
                        out[off + idx] = (out[off + idx] + c) % p
            else:
                for idx, c in enumerate(part):
                    if c:
                        out[off + idx] = ctx.add(out[off + idx], c)
        return Jet(ctx, hi, out, low, max(self.window, other.window))

    def __neg__(self):
        neg = self.ctx.neg
        return Jet(self.ctx, self.hi if self.coeffs else self.low - 1,
                   [neg(c) for c in self.coeffs], self.low, self.window)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "Jet") -> "Jet":
        w = max(self.window, other.window)
        if (not self.coeffs and self.exact) or (not other.coeffs and other.exact):
            return Jet.zero(self.ctx, w)
        if not self.coeffs or not other.coeffs:
            # one factor is an unknown small quantity
            la = self.low if not self.coeffs else self.hi
            lb = other.low if not other.coeffs else other.hi
            low = la + lb - (1 if not self.coeffs and not other.coeffs else 0)
            return Jet(self.ctx, low - 1, [], low, w)
        hi = self.hi + other.hi
        ra = None if self.exact else len(self.coeffs)
        rb = None if other.exact else len(other.coeffs)
        rel = [r for r in (ra, rb) if r is not None]
        if rel:
            k = min(rel)
            low = hi - k + 1
        else:
            k = hi + 1
            low = 0
        k = min(k, w)
        low = max(low, hi - k + 1) if low > 0 or k < hi + 1 else 0
        ctx = self.ctx
        # twisted coefficients are mostly zeros, so loop over nonzero terms only
        a = [(i, c) for i, c in enumerate(self.coeffs[:k]) if c]
        b = [(j, c) for j, c in enumerate(other.coeffs[:k]) if c]
        if len(a) > len(b):
            a, b = b, a
        out = [0] * k
        if ctx.m == 1:
            p = ctx.p
            for i, ca in a:
                lim = k - i
                for j, cb in b:
                    if j >= lim:
                        break
                    out[i + j] += ca * cb
            out = [c % p for c in out]
        else:
            add, mul = ctx.add, ctx.mul
            for i, ca in a:
                lim = k - i
                for j, cb in b:
                    if j >= lim:
                        break
                    out[i + j] = add(out[i + j], mul(ca, cb))
        return Jet(ctx, hi, out, low, w)

    def scale(self, c: int) -> "Jet":
        mul = self.ctx.mul
        if c == 0:
            return Jet.zero(self.ctx, self.window)
        return Jet(self.ctx, self.hi if self.coeffs else self.low - 1,
                   [mul(x, c) for x in self.coeffs], self.low, self.window)

    def frobenius(self, k: int = 1) -> "Jet":
        if k == 0:
            return self
        ctx = self.ctx
        pk = ctx.p ** k
        if not self.coeffs:
            if self.exact:
                return self
            return Jet(ctx, (self.low - 1) * pk, [], (self.low - 1) * pk + 1, self.window)
        hi = self.hi * pk
        low = 0 if self.exact else (self.low - 1) * pk + 1
        n = min(hi - low + 1, self.window)
        out = [0] * n
        for idx, c in enumerate(self.coeffs):
            pos = idx * pk
            if pos >= n:
                break
            out[pos] = ctx.frob(c, k) if ctx.m > 1 else c
        if hi - low + 1 > n:
            low = hi - n + 1
        return Jet(ctx, hi, out, low, self.window)

    def height(self) -> int:
        """Weil height of the polynomial: max(0, degree)."""
        return max(0, self.degree())

    def height_bounds(self):
        """(lo, hi) with lo <= height <= hi; equal unless cancellation ate every known term."""
        if self.coeffs:
            return self.hi, self.hi
        if self.exact:
            return 0, 0
        return 0, max(0, self.low - 1)
