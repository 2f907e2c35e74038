"""Exact linear algebra: over K, over F_q[T] (fraction-free), and over F_p."""

from __future__ import annotations

import numpy as np

from .polys import FqPoly, poly_gcd
from .ratfunc import RatFunc


def solve_K(rows, rhs, ncols):
    """Solve sum_k rows[i][k] x_k = rhs[i] over K by Gauss-Jordan elimination.

    ``rows`` is a list of lists of RatFunc. Returns ``(x, None)`` with a
    particular solution (free variables set to zero), or ``(None, i)``
    where ``i`` is the index of an original equation that exposed the
    inconsistency.
    """
    m = len(rows)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    origin = list(range(m))
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, m):
            if not aug[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        origin[r], origin[piv] = origin[piv], origin[r]
        inv = aug[r][c].inverse()
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and not aug[i][c].is_zero():
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if not aug[i][ncols].is_zero():
            return None, origin[i]
    ctx = rhs[0].ctx if rhs else rows[0][0].ctx
    x = [RatFunc.zero(ctx) for _ in range(ncols)]
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncols]
    return x, None


def rank_K(rows):
    """Rank over K of a dense matrix of RatFunc by plain Gaussian elimination."""
    mat = [list(r) for r in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for c in range(ncols):
        piv = None
        for i in range(rank, len(mat)):
            if not mat[i][c].is_zero():
                piv = i
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][c].inverse()
        for i in range(rank + 1, len(mat)):
            if not mat[i][c].is_zero():
                f = mat[i][c] * inv
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[rank])]
        rank += 1
    return rank


def clear_denominators(values):
    """Scale a list of RatFunc by the lcm of denominators; return FqPoly list."""
    from .polys import poly_lcm

    ctx = values[0].ctx
    den = FqPoly.one(ctx)
    for v in values:
        if not v.den.is_one():
            den = poly_lcm(den, v.den)
    if den.is_one():
        return [v.num for v in values]
    return [v.num * den.exact_div(v.den) for v in values]


def _primitive(row):
    # divide a sparse row {col: FqPoly} by the gcd of its entries, make it monic-led
    g = None
    for v in row.values():
        g = v if g is None else poly_gcd(g, v)
        if g.is_constant():
            break
    if g is not None and not g.is_constant():
        row = {k: v.exact_div(g) for k, v in row.items()}
    return row


class FractionFreeEchelon:
    """Incremental sparse row echelon form over F_q[T].

    Rows are dicts column -> FqPoly. A new row is reduced against the
    stored pivots (cross-multiplying, never dividing except by row
    content), then stored with its lowest-degree entry as pivot. Ties go
    to the smallest column, so results are deterministic.
    """

    def __init__(self):
        self.pivots = {}  # column -> row
        self.order = []

    @property
    def rank(self):
        return len(self.pivots)

    def add(self, row) -> bool:
        """Insert a row; return True if it increased the rank."""
        row = {k: v for k, v in row.items() if not v.is_zero()}
        # stored rows vanish on the pivot columns inserted before them,
        # so one pass in insertion order clears every pivot column
        for c in self.order:
            if not row:
                break
            b = row.get(c)
            if b is None:
                continue
            prow = self.pivots[c]
            a = prow[c]
            g = poly_gcd(a, b)
            fa, fb = a.exact_div(g), b.exact_div(g)
            zero = FqPoly.zero(a.ctx)
            new = {}
            for k in set(row) | set(prow):
                v = row.get(k, zero) * fa - prow.get(k, zero) * fb
                if not v.is_zero():
                    new[k] = v
            row = _primitive(new) if new else new
        if not row:
            return False
        col = min(row, key=lambda k: (row[k].degree(), k))
        self.pivots[col] = row
        self.order.append(col)
        return True


def rank_fraction_free(rows) -> int:
    """Rank over K of sparse rows {col: RatFunc}, clearing denominators first."""
    ech = FractionFreeEchelon()
    for r in rows:
        if not r:
            continue
        keys = sorted(r)
        vals = clear_denominators([r[k] for k in keys])
        ech.add(dict(zip(keys, vals)))
    return ech.rank


def nullspace_mod_p(mat, p: int):
    """Basis of the right kernel of an integer matrix over F_p (numpy RREF)."""
    a = np.array(mat, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("matrix must be 2-d")
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-a[i, f]) % p
        basis.append(v)
    return basis, len(pivots)
