"""Finite fields F_q = F_p[x]/(modulus).

Elements are encoded as integers ``0 <= code < q``: the element
``c_0 + c_1 x + ... + c_{m-1} x^{m-1}`` has code ``c_0 + c_1 p + ... ``.
For ``m == 1`` the code is simply the residue mod p.

Multiplication uses log/antilog tables built once per context; addition
uses digit-wise arithmetic (a table for small q).
"""

from __future__ import annotations

import functools
import itertools


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def _poly_mod_p(a, b, p):
    # remainder of dense coefficient lists (low -> high) over F_p, b monic-able
    a = list(a)
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        c = (a[-1] * inv) % p
        if c:
            off = len(a) - 1 - db
            for k, bk in enumerate(b):
                a[off + k] = (a[off + k] - c * bk) % p
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def is_irreducible_mod_p(f, p: int) -> bool:
    """Trial division of a dense F_p polynomial (low -> high) by all monics of degree <= deg/2."""
    f = [c % p for c in f]
    while f and f[-1] == 0:
        f.pop()
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    for k in range(1, n // 2 + 1):
        for tail in itertools.product(range(p), repeat=k):
            g = list(tail) + [1]
            if not _poly_mod_p(f, g, p):
                return False
    return True


def first_irreducible(p: int, m: int):
    """Lexicographically first monic irreducible of degree m over F_p (dense, low -> high)."""
    for tail in itertools.product(range(p), repeat=m):
        f = list(reversed(tail)) + [1]
        if is_irreducible_mod_p(f, p):
            return tuple(f)
    raise ValueError(f"no irreducible of degree {m} over F_{p}")  # unreachable


class FieldError(ValueError):
    pass


class FqCtx:
    """The field F_q, q = p^m, with arithmetic on integer codes."""

    def __init__(self, p: int, modulus=None):
        if not is_prime(p):
            raise FieldError(f"{p} is not prime")
        if modulus is None:
            modulus = (0, 1)
        modulus = tuple(int(c) % p for c in modulus)
        while modulus and modulus[-1] == 0:
            modulus = modulus[:-1]
        if len(modulus) < 2 or modulus[-1] != 1:
            raise FieldError("modulus must be monic of degree >= 1")
        if not is_irreducible_mod_p(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.m = len(modulus) - 1
        self.q = p ** self.m
        self.modulus = modulus
        if self.m > 1:
            self._build_tables()

    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m}, modulus={list(self.modulus)})"

    def __eq__(self, other):
        return isinstance(other, FqCtx) and self.p == other.p and self.modulus == other.modulus

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __reduce__(self):
        return (GF, (self.p, self.m, self.modulus))

    # --- encoding -------------------------------------------------------

    def digits(self, a: int):
        p = self.p
        out = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            out.append(r)
        return tuple(out)

    def from_digits(self, ds) -> int:
        ds = list(ds)
        if len(ds) > self.m:
            raise FieldError(f"coordinate vector longer than m={self.m}")
        code = 0
        for c in reversed(ds):
            code = code * self.p + (int(c) % self.p)
        return code

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> F_p -> F_q."""
        return n % self.p

    # --- tables for m > 1 -----------------------------------------------

    def _mulx(self, ds):
        # multiply digit vector by x modulo the modulus
        p, m = self.p, self.m
        top = ds[-1]
        shifted = [0] + list(ds[:-1])
        if top:
            for k in range(m):
                shifted[k] = (shifted[k] - top * self.modulus[k]) % p
        return shifted

    def _mul_slow(self, a, b):
        p, m = self.p, self.m
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        return self.from_digits(_poly_mod_p(prod, self.modulus, p) or [0])

    def _build_tables(self):
        q, p = self.q, self.p
        # find a primitive element by brute force
        order = q - 1
        primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
        gen = None
        for g in range(2, q):
            ok = True
            for r in primes:
                if self._pow_slow(g, order // r) == 1:
                    ok = False
                    break
            if ok:
                gen = g
                break
        if gen is None:  # q == 2 handled by m == 1; q == 3.. always have gen
            gen = 1
        exp = [0] * (2 * order)
        log = [0] * q
        x = 1
        for k in range(order):
            exp[k] = x
            log[x] = k
            x = self._mul_slow(x, gen)
        for k in range(order, 2 * order):
            exp[k] = exp[k - order]
        self._exp, self._log, self._order = exp, log, order
        self._add_table = None
        if q <= 256:
            self._add_table = [[self._add_slow(a, b) for b in range(q)] for a in range(q)]
        self._neg = [self.from_digits((-c) % p for c in self.digits(a)) for a in range(q)]
        self._frob = [self._pow(a, p) for a in range(q)]

    def _pow_slow(self, a, e):
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    def _add_slow(self, a, b):
        p = self.p
        return self.from_digits((x + y) % p for x, y in zip(self.digits(a), self.digits(b)))

    def _pow(self, a, e):
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % self._order]

    # --- arithmetic on codes --------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a][b]
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.m == 1:
            return (-a) % self.p
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(self._order - self._log[a]) % self._order]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return pow(a, e, self.p)
        return self._pow(a, e)

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        if self.m == 1 or a == 0:
            return a
        k %= self.m
        for _ in range(k):
            a = self._frob[a]
        return a

    def elements(self):
        return range(self.q)

    def elem(self, value) -> "FqElem":
        if isinstance(value, tuple):
            return FqElem(self, self.from_digits(value))
        return FqElem(self, self.from_int(int(value)))

    def fmt(self, a: int) -> str:
        if self.m == 1:
            return str(a)
        return "(" + ",".join(str(c) for c in self.digits(a)) + ")"


@functools.lru_cache(maxsize=None)
def GF(p: int, m: int = 1, modulus=None) -> FqCtx:
    """Cached field constructor. ``modulus`` is a coefficient tuple (low -> high)."""
    if modulus is None and m > 1:
        modulus = first_irreducible(p, m)
    ctx = FqCtx(p, modulus)
    if ctx.m != m:
        raise FieldError(f"modulus degree {ctx.m} does not match m={m}")
    return ctx


class FqElem:
    """An element of F_q wrapped with its context."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FqCtx, code: int):
        self.ctx = ctx
        self.code = code

    def _coerce(self, other):
        if isinstance(other, FqElem):
            if other.ctx != self.ctx:
                raise FieldError("field context mismatch")
            return other.code
        if isinstance(other, int):
            return self.ctx.from_int(other)
        return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FqElem(self.ctx, self.ctx.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FqElem(self.ctx, self.ctx.sub(self.code, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FqElem(self.ctx, self.ctx.sub(b, self.code))

    def __neg__(self):
        return FqElem(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FqElem(self.ctx, self.ctx.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return FqElem(self.ctx, self.ctx.div(self.code, b))

    def __pow__(self, e: int):
        return FqElem(self.ctx, self.ctx.pow(self.code, e))

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx, self.code))

    def __bool__(self):
        return self.code != 0

    def frobenius(self, k: int = 1) -> "FqElem":
        return FqElem(self.ctx, self.ctx.frob(self.code, k))

    def __repr__(self):
        return f"FqElem({self.ctx.fmt(self.code)} in {self.ctx!r})"


def fq_arith(a: FqElem, b: FqElem, op: str) -> FqElem:
    """Binary field operation by name: add, sub, mul, div."""
    if a.ctx != b.ctx:
        raise FieldError("field context mismatch")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")
