"""Sparse multivariate polynomials over K = F_q(T), keyed by exponent tuples."""

from __future__ import annotations

from .fields import FqCtx
from .ratfunc import RatFunc


def binom_mod_p(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas's theorem."""
    if k < 0 or k > n:
        return 0
    r = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        # small binomial
        num = den = 1
        for t in range(b):
            num = num * (a - t) % p
            den = den * (t + 1) % p
        r = r * num * pow(den, p - 2, p) % p
        n //= p
        k //= p
    return r


class MPoly:
    __slots__ = ("ctx", "nvars", "terms")

    def __init__(self, ctx: FqCtx, nvars: int, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def _raw(cls, ctx, nvars, terms):
        obj = cls.__new__(cls)
        obj.ctx, obj.nvars, obj.terms = ctx, nvars, terms
        return obj

    @classmethod
    def zero(cls, ctx, nvars):
        return cls._raw(ctx, nvars, {})

    @classmethod
    def constant(cls, ctx, nvars, c: RatFunc):
        return cls(ctx, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, ctx, nvars, i):
        e = [0] * nvars
        e[i] = 1
        return cls._raw(ctx, nvars, {tuple(e): RatFunc.one(ctx)})

    @classmethod
    def monomial(cls, ctx, exps, c=None):
        c = RatFunc.one(ctx) if c is None else c
        return cls(ctx, len(exps), {tuple(exps): c})

    def is_zero(self):
        return not self.terms

    def coefficients(self):
        return [self.terms[e] for e in sorted(self.terms)]

    def coefficient(self, exps) -> RatFunc:
        return self.terms.get(tuple(exps), RatFunc.zero(self.ctx))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> int:
        """Lowest total degree present (the order of vanishing at 0)."""
        if not self.terms:
            raise ValueError("zero polynomial has no lowest degree")
        return min(sum(e) for e in self.terms)

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            v = c if v is None else v + c
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
        return MPoly._raw(self.ctx, self.nvars, out)

    def __neg__(self):
        return MPoly._raw(self.ctx, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: RatFunc):
        if c.is_zero():
            return MPoly.zero(self.ctx, self.nvars)
        return MPoly._raw(self.ctx, self.nvars, {e: v * c for e, v in self.terms.items()})

    def mul(self, other, cap=None):
        """Product, dropping monomials of total degree >= cap when cap is given."""
        out = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            if cap is not None and da >= cap:
                continue
            for eb, cb in other.terms.items():
                if cap is not None and da + sum(eb) >= cap:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = ca * cb
                w = out.get(e)
                out[e] = v if w is None else w + v
        return MPoly._raw(self.ctx, self.nvars, {e: c for e, c in out.items() if not c.is_zero()})

    def __mul__(self, other):
        if isinstance(other, RatFunc):
            return self.scale(other)
        return self.mul(other)

    def __pow__(self, n: int):
        return self.power(n)

    def power(self, n: int, cap=None):
        result = MPoly.constant(self.ctx, self.nvars, RatFunc.one(self.ctx))
        base = self
        while n:
            if n & 1:
                result = result.mul(base, cap)
            n >>= 1
            if n:
                base = base.mul(base, cap)
        return result

    def truncate(self, cap):
        return MPoly._raw(self.ctx, self.nvars,
                          {e: c for e, c in self.terms.items() if sum(e) < cap})

    def evaluate(self, point):
        """G(Q) for Q a sequence of RatFunc."""
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        cache = [dict() for _ in range(self.nvars)]

        def pw(i, k):
            d = cache[i]
            if k not in d:
                d[k] = point[i] ** k
            return d[k]

        acc = RatFunc.zero(self.ctx)
        for e in sorted(self.terms):
            term = self.terms[e]
            for i, k in enumerate(e):
                if k:
                    term = term * pw(i, k)
                    if term.is_zero():
                        break
            acc = acc + term
        return acc

    def hyperderivative(self, idx):
        """Delta_idx(G) as a polynomial: sum_e c_e C(e, idx) x^(e - idx)."""
        p = self.ctx.p
        out = {}
        for e, c in self.terms.items():
            if any(x < i for x, i in zip(e, idx)):
                continue
            b = 1
            for x, i in zip(e, idx):
                b = b * binom_mod_p(x, i, p) % p
                if not b:
                    break
            if b:
                out[tuple(x - i for x, i in zip(e, idx))] = c.scale(self.ctx.from_int(b))
        return MPoly._raw(self.ctx, self.nvars, out)

    def shift(self, point):
        """Full expansion of G(z + Q) as a polynomial in z."""
        ctx = self.ctx
        lin = []
        for i, a in enumerate(point):
            v = MPoly.variable(ctx, self.nvars, i)
            if not a.is_zero():
                v = v + MPoly.constant(ctx, self.nvars, a)
            lin.append(v)
        acc = MPoly.zero(ctx, self.nvars)
        for e, c in self.terms.items():
            term = MPoly.constant(ctx, self.nvars, c)
            for i, k in enumerate(e):
                if k:
                    term = term.mul(lin[i] ** k)
            acc = acc + term
        return acc

    def to_json(self):
        return {",".join(map(str, e)): str(self.terms[e]) for e in sorted(self.terms)}

    @classmethod
    def from_json(cls, ctx, nvars, data):
        from .parsing import parse_ratfunc

        terms = {}
        for k, v in data.items():
            e = tuple(int(x) for x in k.split(",")) if k else ()
            terms[e] = parse_ratfunc(ctx, v)
        return cls(ctx, nvars, terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            c = str(self.terms[e])
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)

    __repr__ = __str__


def monomials_below(nvars: int, bound: int):
    """Exponent tuples of total degree < bound, ordered by degree then lexicographically."""
    out = []
    for deg in range(bound):
        for e in _compositions(deg, nvars):
            out.append(e)
    return out


def _compositions(n, k):
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def index_vectors(nvars: int, total: int):
    """All multi-indices with |i| == total."""
    return list(_compositions(total, nvars))

