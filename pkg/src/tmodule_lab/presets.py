"""Named t-modules: Carlitz, its tensor powers, diagonal Frobenius maps, random modules."""

from __future__ import annotations

import random

from .fields import GF, is_prime
from .ore import TwistedOperator
from .polys import FqPoly
from .ratfunc import RatFunc


def carlitz(p: int, m: int = 1) -> TwistedOperator:
    """phi_t = T + tau on G_a."""
    ctx = GF(p, m)
    return TwistedOperator(ctx, [[[RatFunc.T(ctx)]], [[RatFunc.one(ctx)]]])


def carlitz_tensor(p: int, d: int, m: int = 1) -> TwistedOperator:
    """The d-th tensor power: (T + N) + E tau, N the nilpotent shift, E = e_{d,1}."""
    ctx = GF(p, m)
    zero, one, T = RatFunc.zero(ctx), RatFunc.one(ctx), RatFunc.T(ctx)
    A0 = [[T if i == j else (one if j == i + 1 else zero) for j in range(d)] for i in range(d)]
    A1 = [[one if (i, j) == (d - 1, 0) else zero for j in range(d)] for i in range(d)]
    return TwistedOperator(ctx, [A0, A1])


def _log_p(q: int):
    for p in range(2, q + 1):
        if q % p == 0:
            break
    k = 0
    n = q
    while n % p == 0:
        n //= p
        k += 1
    if n != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return p, k


def diagonal(*qs) -> TwistedOperator:
    """x_t -> x_t^(q_t); all q_t must be powers of one prime p (q_t = 1 allowed)."""
    if not qs:
        raise ValueError("need at least one exponent")
    ps, ks = set(), []
    for q in qs:
        if q == 1:
            ks.append(0)
            continue
        p, k = _log_p(q)
        ps.add(p)
        ks.append(k)
    if len(ps) > 1:
        raise ValueError("exponents must be powers of the same prime")
    p = ps.pop() if ps else 2
    ctx = GF(p)
    d = len(qs)
    zero, one = RatFunc.zero(ctx), RatFunc.one(ctx)
    mats = []
    for k in range(max(ks) + 1):
        mats.append([[one if i == j and ks[i] == k else zero for j in range(d)] for i in range(d)])
    return TwistedOperator(ctx, mats)


def _rand_poly(ctx, rng, deg):
    return RatFunc(FqPoly(ctx, {e: rng.randrange(ctx.q) for e in range(deg + 1)}))


def _rand_invertible(ctx, rng, d):
    # constant matrices over F_p; retry until the determinant is nonzero
    p = ctx.p
    while True:
        m = [[rng.randrange(p) for _ in range(d)] for _ in range(d)]
        if _det_mod_p(m, p):
            return m


def _det_mod_p(m, p):
    a = [row[:] for row in m]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] % p), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], p - 2, p)
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            if f:
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return det % p


def random_module(p: int, d: int, r: int, seed: int, entry_degree: int = 2):
    """A random t-module with invertible constant leading matrix A_r.

    Returns (F, P, lam): lower coefficients have polynomial entries of
    degree <= entry_degree, P has polynomial components, and lam is a
    tau-degree 0 row with polynomial entries.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    rng = random.Random(f"tmodule-{p}-{d}-{r}-{seed}")
    ctx = GF(p)
    mats = []
    for _ in range(r):
        mats.append([[_rand_poly(ctx, rng, entry_degree) for _ in range(d)] for _ in range(d)])
    top = _rand_invertible(ctx, rng, d)
    mats.append([[RatFunc.const(ctx, x) for x in row] for row in top])
    F = TwistedOperator(ctx, mats)
    P = tuple(_rand_poly(ctx, rng, entry_degree) for _ in range(d))
    while True:
        row = [_rand_poly(ctx, rng, entry_degree) for _ in range(d)]
        if any(not x.is_zero() for x in row):
            break
    lam = TwistedOperator(ctx, [[row]])
    return F, P, lam


PRESETS = {
    "carlitz": carlitz,
    "carlitz-tensor": carlitz_tensor,
    "diagonal": diagonal,
    "random": random_module,
}
