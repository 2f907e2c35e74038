"""Matrix twisted polynomials F = A_0 + A_1 tau + ... + A_r tau^r over K.

Twisted multiplication obeys tau * a = a^p * tau, so the coefficient of
tau^i in a composite F o G is sum_j A_j B_{i-j}^(p^j) with the twist
applied entrywise. Entries are ``RatFunc`` in general; the dynamics
module also runs the same code on ``Jet`` entries to track degrees of
very large iterates.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

from .fields import FqCtx
from .jets import DEFAULT_WINDOW, Jet
from .linalg import solve_K
from .mpoly import MPoly
from .polys import TPoly
from .ratfunc import RatFunc


def _is_exact_zero(x) -> bool:
    if isinstance(x, Jet):
        return not x.coeffs and x.exact
    return x.is_zero()


def _zero_like(x):
    if isinstance(x, Jet):
        return Jet.zero(x.ctx, x.window)
    return RatFunc.zero(x.ctx)


def _matmul(a, b, zero):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = []
    for i in range(rows):
        row = []
        for k in range(cols):
            acc = None
            for j in range(inner):
                x, y = a[i][j], b[j][k]
                if _is_exact_zero(x) or _is_exact_zero(y):
                    continue
                t = x * y
                acc = t if acc is None else acc + t
            row.append(zero if acc is None else acc)
        out.append(tuple(row))
    return tuple(out)


def _matadd(a, b):
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _twist(a, k):
    if k == 0:
        return a
    return tuple(tuple(x.frobenius(k) for x in row) for row in a)


def _matrix_is_zero(a) -> bool:
    return all(x.is_zero() for row in a for x in row)


class TwistedOperator:
    """An e x d matrix twisted polynomial; ``coeffs[i]`` is the matrix A_i."""

    __slots__ = ("ctx", "in_dim", "out_dim", "coeffs", "kind", "window")

    def __init__(self, ctx: FqCtx, coeffs, in_dim=None, out_dim=None):
        mats = [tuple(tuple(row) for row in m) for m in coeffs]
        if mats:
            out_dim = len(mats[0]) if out_dim is None else out_dim
            in_dim = len(mats[0][0]) if in_dim is None else in_dim
            for m in mats:
                if len(m) != out_dim or any(len(r) != in_dim for r in m):
                    raise ValueError("coefficient matrices must all be out_dim x in_dim")
        if in_dim is None or out_dim is None:
            raise ValueError("dimensions required for the zero operator")
        while mats and _matrix_is_zero(mats[-1]):
            mats.pop()
        self.ctx = ctx
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.coeffs = tuple(mats)
        sample = mats[0][0][0] if mats else None
        self.kind = "jet" if isinstance(sample, Jet) else "ratfunc"
        self.window = sample.window if isinstance(sample, Jet) else None

    # --- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, ctx, d):
        one, zero = RatFunc.one(ctx), RatFunc.zero(ctx)
        return cls(ctx, [[[one if i == j else zero for j in range(d)] for i in range(d)]])

    @classmethod
    def zero(cls, ctx, out_dim, in_dim):
        return cls(ctx, [], in_dim=in_dim, out_dim=out_dim)

    @classmethod
    def tau_power(cls, ctx, k, d=1):
        one, zero = RatFunc.one(ctx), RatFunc.zero(ctx)
        zm = [[zero] * d for _ in range(d)]
        idm = [[one if i == j else zero for j in range(d)] for i in range(d)]
        return cls(ctx, [zm] * k + [idm])

    @property
    def p(self) -> int:
        return self.ctx.p

    @property
    def tau_degree(self) -> int:
        """Largest i with A_i != 0; -1 for the zero operator."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_square(self) -> bool:
        return self.in_dim == self.out_dim

    def coefficient(self, i):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        z = self._zero()
        return tuple(tuple(z for _ in range(self.in_dim)) for _ in range(self.out_dim))

    def _zero(self):
        if self.kind == "jet":
            return Jet.zero(self.ctx, self.window)
        return RatFunc.zero(self.ctx)

    def entries(self):
        for m in self.coeffs:
            for row in m:
                yield from row

    def __eq__(self, other):
        if not isinstance(other, TwistedOperator):
            return NotImplemented
        return (self.in_dim, self.out_dim, self.coeffs) == (other.in_dim, other.out_dim, other.coeffs)

    def __hash__(self):
        return hash((self.in_dim, self.out_dim, self.coeffs))

    def __repr__(self):
        return f"TwistedOperator({self.out_dim}x{self.in_dim}, tau-degree {self.tau_degree})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, m in enumerate(self.coeffs):
            if _matrix_is_zero(m):
                continue
            if self.in_dim == self.out_dim == 1:
                mat = str(m[0][0])
            else:
                mat = "[" + "; ".join(", ".join(str(x) for x in row) for row in m) + "]"
            parts.append(mat if i == 0 else f"{mat}*tau" + (f"^{i}" if i > 1 else ""))
        return " + ".join(parts)

    # --- algebra ----------------------------------------------------------

    def __add__(self, other):
        if (self.in_dim, self.out_dim) != (other.in_dim, other.out_dim):
            raise ValueError("dimension mismatch in operator sum")
        n = max(len(self.coeffs), len(other.coeffs))
        mats = [_matadd(self.coefficient(i), other.coefficient(i)) for i in range(n)]
        return TwistedOperator(self.ctx, mats, self.in_dim, self.out_dim)

    def __neg__(self):
        mats = [tuple(tuple(-x for x in row) for row in m) for m in self.coeffs]
        return TwistedOperator(self.ctx, mats, self.in_dim, self.out_dim)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int):
        """Multiply by a field code (an element of F_q, central only for F_p)."""
        mats = [tuple(tuple(x.scale(c) for x in row) for row in m) for m in self.coeffs]
        return TwistedOperator(self.ctx, mats, self.in_dim, self.out_dim)

    def left_mul(self, a):
        """A o F for a K-matrix A (tau-degree 0 operator)."""
        return compose(TwistedOperator(self.ctx, [a], self.out_dim, len(a)), self)

    def row(self, i):
        """m_i o F as a 1 x d operator."""
        return TwistedOperator(self.ctx, [[m[i]] for m in self.coeffs], self.in_dim, 1)

    def __call__(self, point):
        return evaluate(self, point)

    def to_jets(self, window=DEFAULT_WINDOW):
        if self.kind == "jet":
            return self
        mats = [
            tuple(tuple(Jet.from_ratfunc(x, window) for x in row) for row in m)
            for m in self.coeffs
        ]
        return TwistedOperator(self.ctx, mats, self.in_dim, self.out_dim)

    def is_integral(self) -> bool:
        """All entries lie in F_q[T]."""
        return all(isinstance(x, Jet) or x.is_poly() for x in self.entries())

    def pullback(self):
        """The coordinate functions (F)^* m_i as polynomials in x_1..x_d."""
        if self.kind != "ratfunc":
            raise TypeError("pullback needs exact entries")
        d = self.in_dim
        out = []
        for i in range(self.out_dim):
            terms = {}
            for k, m in enumerate(self.coeffs):
                pk = self.p ** k
                for c in range(d):
                    a = m[i][c]
                    if not a.is_zero():
                        e = [0] * d
                        e[c] = pk
                        terms[tuple(e)] = a
            out.append(MPoly(self.ctx, d, terms))
        return out


def compose(F: TwistedOperator, G: TwistedOperator) -> TwistedOperator:
    """F o G; coefficient of tau^i is sum_j A_j B_{i-j}^(p^j)."""
    if F.in_dim != G.out_dim:
        raise ValueError(f"cannot compose: F takes dim {F.in_dim}, G gives dim {G.out_dim}")
    if F.is_zero() or G.is_zero():
        return TwistedOperator.zero(F.ctx, F.out_dim, G.in_dim)
    rf, rg = F.tau_degree, G.tau_degree
    zero = F._zero() if F.kind == "jet" else G._zero()
    twisted = {}
    mats = []
    for i in range(rf + rg + 1):
        acc = None
        for j in range(max(0, i - rg), min(i, rf) + 1):
            key = (i - j, j)
            if key not in twisted:
                twisted[key] = _twist(G.coeffs[i - j], j)
            t = _matmul(F.coeffs[j], twisted[key], zero)
            acc = t if acc is None else _matadd(acc, t)
        mats.append(acc)
    return TwistedOperator(F.ctx, mats, G.in_dim, F.out_dim)


class IterateCache:
    """Append-only store of F^0, F^1, ...; readers never block each other's results."""

    def __init__(self, F: TwistedOperator):
        if not F.is_square():
            raise ValueError("iteration needs a square operator")
        self.F = F
        if F.kind == "jet":
            one = Jet.from_ratfunc(RatFunc.one(F.ctx), F.window)
            zero = Jet.zero(F.ctx, F.window)
            d = F.in_dim
            ident = TwistedOperator(F.ctx, [[[one if i == j else zero for j in range(d)] for i in range(d)]])
        else:
            ident = TwistedOperator.identity(F.ctx, F.in_dim)
        self._items = [ident]
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._items)

    def get(self, n: int) -> TwistedOperator:
        if n < 0:
            raise ValueError("n must be >= 0")
        items = self._items
        if n < len(items):
            return items[n]
        with self._lock:
            while len(self._items) <= n:
                self._items.append(compose(self.F, self._items[-1]))
        return self._items[n]


def iterate(F: TwistedOperator, n: int, cache: IterateCache | None = None) -> TwistedOperator:
    """F^n by linear chaining F^(k+1) = F o F^k, reusing ``cache`` if given."""
    if not F.is_square():
        raise ValueError("iteration needs a square operator")
    if cache is None:
        cache = IterateCache(F)
    elif cache.F is not F and cache.F != F:
        raise ValueError("cache belongs to a different operator")
    return cache.get(n)


def evaluate(F: TwistedOperator, point):
    """F(P) = sum_i A_i P^(p^i) with the Frobenius applied entrywise to P."""
    point = tuple(point)
    if len(point) != F.in_dim:
        raise ValueError(f"point has dimension {len(point)}, operator expects {F.in_dim}")
    if F.is_zero():
        z = point[0] - point[0] if point else RatFunc.zero(F.ctx)
        return tuple(z for _ in range(F.out_dim))
    acc = None
    tw = point
    for i, m in enumerate(F.coeffs):
        if i:
            tw = tuple(x.frobenius(1) for x in tw)
        col = tuple((x,) for x in tw)
        t = _matmul(m, col, _zero_like(point[0]))
        acc = t if acc is None else _matadd(acc, t)
    return tuple(r[0] for r in acc)


def apply_tpoly(b: TPoly, F: TwistedOperator, cache: IterateCache | None = None) -> TwistedOperator:
    """b(F) = sum_m b_m F^m for b in F_p[t]."""
    if not F.is_square():
        raise ValueError("b(F) needs a square operator")
    if cache is None:
        cache = IterateCache(F)
    acc = TwistedOperator.zero(F.ctx, F.out_dim, F.in_dim)
    for m, c in sorted(b.terms.items()):
        acc = acc + cache.get(m).scale(c)
    return acc


def tpolys_up_to(p: int, S: int):
    """All b in F_p[t] with deg b <= S (including 0), in a fixed order."""
    from .fields import GF

    ctx = GF(p)
    for coeffs in itertools.product(range(p), repeat=S + 1):
        yield TPoly.from_dense(ctx, list(coeffs))


def point_add(P, Q):
    return tuple(a + b for a, b in zip(P, Q))


def point_sub(P, Q):
    return tuple(a - b for a, b in zip(P, Q))


def point_scale(P, c: int):
    return tuple(a.scale(c) for a in P)


def gamma_set(F: TwistedOperator, P, S: int):
    """Gamma(S, P) = {b(F)(P) : deg b <= S}, deduplicated in a fixed order."""
    if S < 0:
        raise ValueError("S must be >= 0")
    ctx = F.ctx
    orbit = [tuple(P)]
    for _ in range(S):
        orbit.append(evaluate(F, orbit[-1]))
    zero = tuple(RatFunc.zero(ctx) for _ in P)
    seen = {}
    for coeffs in itertools.product(range(F.p), repeat=S + 1):
        acc = zero
        for c, Q in zip(coeffs, orbit):
            if c:
                acc = point_add(acc, point_scale(Q, ctx.from_int(c)))
        if acc not in seen:
            seen[acc] = None
    return list(seen)


@dataclass
class StabilityResult:
    stable: bool
    f_prime: TwistedOperator | None = None
    witness: tuple | None = None  # (tau power n, row, column) of a failing equation

    def __bool__(self):
        return self.stable


def stability_check(pi: TwistedOperator, F: TwistedOperator) -> StabilityResult:
    """Decide whether pi o F = F' o pi for some e x e twisted operator F'.

    The unknown coefficients B_j of F' enter F' o pi = sum_j B_j pi^(p^j)
    tau^j K-linearly, so each row of F' is found by solving one linear
    system over K, matching coefficients tau-degree by tau-degree.
    """
    if pi.is_zero():
        raise ValueError("pi must be nonzero")
    if not F.is_square() or pi.in_dim != F.out_dim:
        raise ValueError("need pi: e x d and F: d x d")
    ctx = F.ctx
    e, d = pi.out_dim, pi.in_dim
    lhs = compose(pi, F)
    if lhs.is_zero():
        fp = TwistedOperator.zero(ctx, e, e)
        return StabilityResult(True, fp)
    s = max(0, lhs.tau_degree - pi.tau_degree)
    top = s + pi.tau_degree
    zero = RatFunc.zero(ctx)
    twisted = [[_twist(pi.coefficient(k), j) for k in range(pi.tau_degree + 1)] for j in range(s + 1)]
    # equations indexed by (n, c); unknowns by (j, b)
    eq_index = [(n, c) for n in range(top + 1) for c in range(d)]
    rows = []
    for n, c in eq_index:
        row = []
        for j in range(s + 1):
            k = n - j
            for b in range(e):
                if 0 <= k <= pi.tau_degree:
                    row.append(twisted[j][k][b][c])
                else:
                    row.append(zero)
        rows.append(row)
    solution = [[[zero] * e for _ in range(e)] for _ in range(s + 1)]
    for a in range(e):
        rhs = [lhs.coefficient(n)[a][c] for n, c in eq_index]
        x, bad = solve_K(rows, rhs, (s + 1) * e)
        if x is None:
            n, c = eq_index[bad]
            return StabilityResult(False, None, (n, a, c))
        for j in range(s + 1):
            for b in range(e):
                solution[j][a][b] = x[j * e + b]
    fp = TwistedOperator(ctx, solution, e, e)
    if compose(fp, pi) != lhs:
        raise AssertionError("stability solution failed exact verification")
    return StabilityResult(True, fp)


def degrees(F: TwistedOperator):
    """(tau_degree, total degree p^tau_degree) of a nonzero operator."""
    if F.is_zero():
        raise ValueError("degrees of the zero operator are undefined")
    r = F.tau_degree
    return r, F.p ** r
