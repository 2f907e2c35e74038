"""Sparse univariate polynomials over F_q.

An ``FqPoly`` stores a map exponent -> nonzero field code. Iterated
Frobenius twists spread exponents geometrically (degree ~ p^k times the
input), so the sparse form is the storage format; division and gcd switch
to dense working lists internally.
"""

from __future__ import annotations

import functools
import itertools

from .fields import FqCtx


class FqPoly:
    """Immutable polynomial over F_q in the variable T."""

    __slots__ = ("ctx", "terms", "_hash")

    var = "T"

    def __init__(self, ctx: FqCtx, terms=None):
        self.ctx = ctx
        if terms is None:
            terms = {}
        elif not isinstance(terms, dict):
            # dense list/tuple, low -> high
            terms = {k: c for k, c in enumerate(terms)}
        self.terms = {k: c for k, c in terms.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ctx, terms):
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, ctx):
        return cls._raw(ctx, {})

    @classmethod
    def one(cls, ctx):
        return cls._raw(ctx, {0: 1})

    @classmethod
    def constant(cls, ctx, c: int):
        return cls._raw(ctx, {0: c} if c else {})

    @classmethod
    def monomial(cls, ctx, k: int, c: int = 1):
        return cls._raw(ctx, {k: c} if c else {})

    @classmethod
    def from_dense(cls, ctx, coeffs):
        return cls._raw(ctx, {k: c for k, c in enumerate(coeffs) if c})

    def _new(self, terms):
        return type(self)._raw(self.ctx, terms)

    # --- basic queries --------------------------------------------------

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return max(self.terms) if self.terms else -1

    def lc(self) -> int:
        return self.terms[max(self.terms)] if self.terms else 0

    def low_degree(self) -> int:
        return min(self.terms) if self.terms else -1

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {0: 1}

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def coeff(self, k: int) -> int:
        return self.terms.get(k, 0)

    def dense(self):
        n = self.degree()
        out = [0] * (n + 1)
        for k, c in self.terms.items():
            out[k] = c
        return out

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, FqPoly):
            return self.ctx == other.ctx and self.terms == other.terms
        if isinstance(other, int):
            c = self.ctx.from_int(other)
            return self.terms == ({0: c} if c else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.p, self.ctx.modulus, frozenset(self.terms.items())))
        return self._hash

    def sort_key(self):
        return (self.degree(), tuple(sorted(self.terms.items(), reverse=True)))

    # --- ring operations --------------------------------------------------

    def _check(self, other):
        if isinstance(other, FqPoly):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ValueError("polynomial contexts differ")
            return other
        if isinstance(other, int):
            return FqPoly.constant(self.ctx, self.ctx.from_int(other))
        return None

    def __add__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            a, b = other.terms, self.terms
        else:
            a, b = self.terms, other.terms
        out = dict(a)
        ctx = self.ctx
        if ctx.m == 1:
            p = ctx.p
            for k, c in b.items():
                v = (out.get(k, 0) + c) % p
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        else:
            add = ctx.add
            for k, c in b.items():
                v = add(out.get(k, 0), c)
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.ctx.neg
        return self._new({k: neg(c) for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def scale(self, c: int) -> "FqPoly":
        if c == 0:
            return self._new({})
        if c == 1:
            return self
        mul = self.ctx.mul
        return self._new({k: mul(v, c) for k, v in self.terms.items()})

    def shift(self, k: int) -> "FqPoly":
        return self._new({e + k: c for e, c in self.terms.items()})

    def __mul__(self, other):
        other = self._check(other)
        if other is None:
            return NotImplemented
        a, b = self.terms, other.terms
        if not a or not b:
            return self._new({})
        if len(a) < len(b):
            a, b = b, a
        ctx = self.ctx
        out = {}
        if ctx.m == 1:
            p = ctx.p
            for eb, cb in b.items():
                for ea, ca in a.items():
                    k = ea + eb
                    out[k] = (out.get(k, 0) + ca * cb) % p
        else:
            add, mul = ctx.add, ctx.mul
            for eb, cb in b.items():
                for ea, ca in a.items():
                    k = ea + eb
                    out[k] = add(out.get(k, 0), mul(ca, cb))
        return self._new({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = self._new({0: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def frobenius(self, k: int = 1) -> "FqPoly":
        """f^(p^k), computed termwise (Frobenius is a ring map)."""
        if k == 0:
            return self
        pk = self.ctx.p ** k
        ctx = self.ctx
        if ctx.m == 1:
            return self._new({e * pk: c for e, c in self.terms.items()})
        return self._new({e * pk: ctx.frob(c, k) for e, c in self.terms.items()})

    # --- division ---------------------------------------------------------

    def divmod(self, other: "FqPoly"):
        other = self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        ctx = self.ctx
        db = other.degree()
        if self.degree() < db:
            return self._new({}), self
        if db == 0:
            inv = ctx.inv(other.lc())
            return self.scale(inv), self._new({})
        qd, r = _dense_divmod(self.dense(), other.dense(), ctx)
        return FqPoly.from_dense(ctx, qd), FqPoly.from_dense(ctx, r)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "FqPoly") -> "FqPoly":
        q, r = self.divmod(other)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        return q

    def monic(self) -> "FqPoly":
        if not self.terms:
            return self
        return self.scale(self.ctx.inv(self.lc()))

    def is_monic(self) -> bool:
        return bool(self.terms) and self.lc() == 1

    def derivative(self) -> "FqPoly":
        ctx = self.ctx
        return self._new(
            {e - 1: ctx.mul(c, ctx.from_int(e)) for e, c in self.terms.items() if e % ctx.p}
        )

    def __call__(self, x: int) -> int:
        """Evaluate at a field code."""
        ctx = self.ctx
        acc = 0
        for e in range(self.degree(), -1, -1):
            acc = ctx.add(ctx.mul(acc, x), self.terms.get(e, 0))
        return acc

    # --- formatting -------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        fmt = self.ctx.fmt
        v = self.var
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            cs = fmt(c)
            if e == 0:
                parts.append(cs)
            else:
                mono = v if e == 1 else f"{v}^{e}"
                parts.append(mono if c == 1 else f"{cs}*{mono}")
        return "+".join(parts)

    def __repr__(self):
        return f"FqPoly({self})"


class TPoly(FqPoly):
    """Polynomial over F_p in the variable t (elements b of F_p[t])."""

    __slots__ = ()
    var = "t"

    def __repr__(self):
        return f"TPoly({self})"


# --- dense helpers ---------------------------------------------------------

def _dense_divmod(a, b, ctx):
    a = list(a)
    db = len(b) - 1
    inv = ctx.inv(b[-1])
    nq = len(a) - db
    q = [0] * max(nq, 0)
    if ctx.m == 1:
        p = ctx.p
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i]
            if c:
                c = (c * inv) % p
                q[i - db] = c
                off = i - db
                for k in range(db + 1):
                    bk = b[k]
                    if bk:
                        a[off + k] = (a[off + k] - c * bk) % p
    else:
        mul, sub = ctx.mul, ctx.sub
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i]
            if c:
                c = mul(c, inv)
                q[i - db] = c
                off = i - db
                for k in range(db + 1):
                    bk = b[k]
                    if bk:
                        a[off + k] = sub(a[off + k], mul(c, bk))
    r = a[:db]
    while r and r[-1] == 0:
        r.pop()
    return q, r


def _dense_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _dense_gcd(a, b, ctx):
    a = _dense_trim(list(a))
    b = _dense_trim(list(b))
    while b:
        _, r = _dense_divmod(a, b, ctx) if len(a) >= len(b) else ([], a)
        a, b = b, r
    if a:
        inv = ctx.inv(a[-1])
        a = [ctx.mul(c, inv) for c in a]
    return a


def poly_gcd(f: FqPoly, g: FqPoly) -> FqPoly:
    """Monic gcd; gcd(0, 0) is undefined."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    if f.is_constant() or g.is_constant():
        return FqPoly.one(f.ctx)
    # strip common powers of T cheaply before going dense
    lo = min(f.low_degree(), g.low_degree())
    fl, gl = f.low_degree(), g.low_degree()
    if fl or gl:
        f = f.shift(-fl)
        g = g.shift(-gl)
    d = _dense_gcd(f.dense(), g.dense(), f.ctx)
    res = FqPoly.from_dense(f.ctx, d)
    return res.shift(lo) if lo else res


def poly_lcm(f: FqPoly, g: FqPoly) -> FqPoly:
    if f.is_zero() or g.is_zero():
        return FqPoly.zero(f.ctx)
    return (f * g.exact_div(poly_gcd(f, g))).monic()


def poly_xgcd(f: FqPoly, g: FqPoly):
    """(d, s, t) with s f + t g = d = gcd(f, g) monic."""
    ctx = f.ctx
    r0, r1 = f, g
    s0, s1 = FqPoly.one(ctx), FqPoly.zero(ctx)
    t0, t1 = FqPoly.zero(ctx), FqPoly.one(ctx)
    while r1:
        q, r = r0.divmod(r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if r0.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    inv = ctx.inv(r0.lc())
    return r0.scale(inv), s0.scale(inv), t0.scale(inv)


# --- irreducibles and factoring ------------------------------------------

def monics(ctx: FqCtx, k: int):
    """All monic polynomials of degree k, in a fixed order."""
    for tail in itertools.product(range(ctx.q), repeat=k):
        terms = {k: 1}
        for e, c in enumerate(reversed(tail)):
            if c:
                terms[e] = c
        yield FqPoly._raw(ctx, terms)


@functools.lru_cache(maxsize=None)
def irreducibles(ctx: FqCtx, k: int):
    """Monic irreducibles of degree exactly k, by sieving with lower degrees."""
    if k < 1:
        return ()
    lower = [g for j in range(1, k // 2 + 1) for g in irreducibles(ctx, j)]
    out = []
    for f in monics(ctx, k):
        if all(f.divmod(g)[1] for g in lower):
            out.append(f)
    return tuple(out)


def is_irreducible(f: FqPoly) -> bool:
    """Trial division by every monic irreducible of degree <= deg f / 2."""
    n = f.degree()
    if n < 1:
        return False
    for j in range(1, n // 2 + 1):
        for g in irreducibles(f.ctx, j):
            if not (f % g):
                return False
    return True


def poly_factor(f: FqPoly):
    """Factor into monic irreducibles: list of (factor, multiplicity), sorted.

    The leading unit is dropped; ``f.lc() * prod(g**e)`` recovers f.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    ctx = f.ctx
    f = f.monic()
    out = []
    if f.low_degree() > 0:
        out.append((FqPoly.monomial(ctx, 1), f.low_degree()))
        f = f.shift(-f.low_degree())
    j = 1
    while f.degree() >= 2 * j:
        for g in irreducibles(ctx, j):
            if j == 1 and g.terms == {1: 1}:
                continue
            e = 0
            while True:
                qq, r = f.divmod(g)
                if r:
                    break
                f = qq
                e += 1
            if e:
                out.append((g, e))
            if f.degree() < 2 * j:
                break
        j += 1
    if f.degree() >= 1:
        out.append((f, 1))
    out.sort(key=lambda ge: ge[0].sort_key())
    merged = []
    for g, e in out:
        if merged and merged[-1][0] == g:
            merged[-1] = (g, merged[-1][1] + e)
        else:
            merged.append((g, e))
    return merged
