"""Saturation degree: linear spans of products of pulled-back coordinates.

For a square twisted operator F on G_a^d put

    Psi[i, n, j] = ((F^n)^* x_i)^j,   1 <= i <= d, 0 <= n < N, 1 <= j < L,

and let V(N, L) be the K-span of all products of Psi's over subsets of
that index set. kappa(F) is the growth rate for which dim V(N, L) keeps
up with kappa^(dN). Finite N never certifies a supremum, so everything
here is an estimate with explicit bounds.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from math import comb

from .dynamics import dynamic_degree
from .linalg import FractionFreeEchelon, clear_denominators
from .mpoly import MPoly
from .ore import IterateCache, TwistedOperator
from .ratfunc import RatFunc

DEFAULT_BUDGET = 20000


@dataclass
class PsiBasis:
    ctx: object
    N: int
    L: int
    d: int
    index: list  # (i, n, j) triples, 0-based i
    funcs: list  # MPoly, parallel to index
    degree_cap: int | None = None

    def get(self, i, n, j) -> MPoly:
        return self.funcs[self.index.index((i, n, j))]

    def degrees(self):
        return [f.total_degree() for f in self.funcs]


def psi_build(F: TwistedOperator, N: int, L: int, degree_cap: int | None = None,
              cache: IterateCache | None = None) -> PsiBasis:
    """All Psi[i, n, j] for 0 <= n < N, 1 <= j < L as sparse polynomials.

    ``degree_cap`` is recorded for the product enumeration; the Psi
    themselves are always materialized in full.
    """
    if N < 1 or L < 1:
        raise ValueError("N and L must be at least 1")
    if not F.is_square():
        raise ValueError("saturation needs a square operator")
    cache = cache or IterateCache(F)
    d = F.in_dim
    index, funcs = [], []
    for n in range(N):
        pulled = cache.get(n).pullback()
        for i in range(d):
            base = pulled[i]
            power = MPoly.constant(F.ctx, d, RatFunc.one(F.ctx))
            for j in range(1, L):
                power = power.mul(base)
                index.append((i, n, j))
                funcs.append(power)
    return PsiBasis(ctx=F.ctx, N=N, L=L, d=d, index=index, funcs=funcs, degree_cap=degree_cap)


def subsets_by_degree(weights, cap=None, budget=None):
    """Yield index tuples of subsets in increasing total weight.

    Uses the usual best-first scheme on sorted weights: from a subset whose
    largest element is k, either append k+1 or replace k by k+1. Each subset
    is produced exactly once; the empty subset comes first.
    """
    order = sorted(range(len(weights)), key=lambda k: (weights[k], k))
    w = [weights[k] for k in order]
    count = 0
    yield ()
    count += 1
    if not w:
        return
    heap = [(w[0], (0,))]
    while heap:
        if budget is not None and count >= budget:
            return
        total, sub = heapq.heappop(heap)
        if cap is not None and total > cap:
            return
        yield tuple(order[k] for k in sub)
        count += 1
        last = sub[-1]
        if last + 1 < len(w):
            heapq.heappush(heap, (total + w[last + 1], sub + (last + 1,)))
            heapq.heappush(heap, (total - w[last] + w[last + 1], sub[:-1] + (last + 1,)))


@dataclass
class KappaReport:
    d: int
    dims: dict = field(default_factory=dict)  # (N, L) -> dim
    truncated: dict = field(default_factory=dict)  # (N, L) -> True when the budget ran out
    products: dict = field(default_factory=dict)  # (N, L) -> products generated
    degree_cap: dict = field(default_factory=dict)
    counting_bound: dict = field(default_factory=dict)
    bracket: tuple | None = None
    notes: list = field(default_factory=list)

    def estimate(self, N, L):
        dim = self.dims[(N, L)]
        return dim ** (1.0 / (self.d * N)) if dim > 0 else 0.0

    def merge(self, other: "KappaReport"):
        for name in ("dims", "truncated", "products", "degree_cap", "counting_bound"):
            getattr(self, name).update(getattr(other, name))
        self.notes.extend(n for n in other.notes if n not in self.notes)
        return self

    def rows(self):
        out = []
        for (N, L) in sorted(self.dims):
            out.append({
                "N": N,
                "L": L,
                "degree_cap": self.degree_cap.get((N, L)),
                "dim": self.dims[(N, L)],
                "estimate": self.estimate(N, L),
                "lower_bound_only": self.truncated.get((N, L), False),
                "products": self.products.get((N, L)),
            })
        return out

    def is_monotone(self) -> bool:
        for (N, L), dim in self.dims.items():
            for (N2, L2), dim2 in self.dims.items():
                if N2 >= N and L2 >= L and dim2 < dim:
                    if not self.truncated.get((N2, L2)):
                        return False
        return True

    def to_json(self) -> str:
        data = {
            "d": self.d,
            "rows": self.rows(),
            "bracket": None if self.bracket is None else list(self.bracket),
            "notes": self.notes,
        }
        return json.dumps(data, indent=2, sort_keys=True)


def span_dimension(basis: PsiBasis, budget: int = DEFAULT_BUDGET) -> KappaReport:
    """Rank over K of all subset-products of the Psi's (up to cap and budget).

    Products are generated in increasing total degree; identical products
    are dropped before elimination. If the budget stops the enumeration
    early the dimension is flagged as a lower bound.
    """
    ctx, d = basis.ctx, basis.d
    weights = basis.degrees()
    cap = basis.degree_cap
    one = MPoly.constant(ctx, d, RatFunc.one(ctx))
    memo = {(): one}
    seen = set()
    ech = FractionFreeEchelon()
    cols = {}
    generated = 0
    max_deg = 0
    for sub in subsets_by_degree(weights, cap=cap, budget=budget):
        generated += 1
        key = tuple(sorted(sub))
        if key:
            head = memo.get(key[:-1])
            if head is None:
                head = _product(basis, key[:-1], one)
            prod = head.mul(basis.funcs[key[-1]])
        else:
            prod = one
        memo[key] = prod
        sig = frozenset(prod.terms.items())
        if sig in seen:
            continue
        seen.add(sig)
        max_deg = max(max_deg, prod.total_degree())
        keys = sorted(prod.terms)
        vals = clear_denominators([prod.terms[e] for e in keys])
        row = {}
        for e, v in zip(keys, vals):
            if e not in cols:
                cols[e] = len(cols)
            row[cols[e]] = v
        ech.add(row)
    if cap is None:
        truncated = generated < 2 ** len(weights)
    else:
        truncated = _count_below_cap(weights, cap) > generated
    rep = KappaReport(d=d)
    key = (basis.N, basis.L)
    rep.dims[key] = ech.rank
    rep.truncated[key] = truncated
    rep.products[key] = generated
    rep.degree_cap[key] = cap
    D = cap if cap is not None else max_deg
    rep.counting_bound[key] = comb(D + d, d)
    if ech.rank > rep.counting_bound[key]:
        raise AssertionError("span dimension exceeds the monomial count")
    if truncated:
        rep.notes.append(f"budget exhausted at (N={basis.N}, L={basis.L}); dimension is a lower bound")
    return rep


def _product(basis, key, one):
    prod = one
    for k in key:
        prod = prod.mul(basis.funcs[k])
    return prod


def _count_below_cap(weights, cap):
    # number of subsets of total weight <= cap, counted by a knapsack table
    counts = [0] * (cap + 1)
    counts[0] = 1
    for w in weights:
        if w > cap:
            continue
        for s in range(cap, w - 1, -1):
            counts[s] += counts[s - w]
    return sum(counts)


def saturation_table(F: TwistedOperator, Ns, Ls, degree_cap=None, budget=DEFAULT_BUDGET) -> KappaReport:
    """span_dimension over a grid of (N, L), sharing one iterate cache."""
    cache = IterateCache(F)
    rep = KappaReport(d=F.in_dim)
    for L in Ls:
        for N in Ns:
            basis = psi_build(F, N, L, degree_cap, cache=cache)
            rep.merge(span_dimension(basis, budget))
    return rep


def kappa_bracket(F: TwistedOperator, report: KappaReport, delta=None, N_max_delta: int = 12):
    """Interval [lower, upper] meant to contain kappa(F).

    The upper end is delta (read from the dynamic degree). The lower end is
    delta^(1/d), raised to the measured estimate dim^(1/(dN)) at the largest
    N computed for each L, taking the smallest such estimate over L and never
    going above delta. Small-N counts carry constant factors that push the
    raw estimates above the limit, so the smallest one is the safer choice.
    """
    Ns = sorted({N for N, _ in report.dims})
    if len(Ns) < 2:
        raise ValueError("need at least two values of N")
    d = report.d
    exact = True
    if delta is None:
        dyn = dynamic_degree(F, N_max_delta)
        delta = dyn.delta
        if delta is None:
            exact = False
            t = dyn.tau_degrees()
            n = len(t) - 1
            delta = F.p ** (t[n] / n) if n else 1.0
            report.notes.append("delta not exactly detected; upper bound is an estimate")
    lower = delta ** (1.0 / d)
    per_L = {}
    for (N, L) in report.dims:
        if L < 2:
            continue  # no Psi's at all: the span is just the constants
        if L not in per_L or N > per_L[L][0]:
            per_L[L] = (N, report.estimate(N, L))
    measured = [est for _, est in per_L.values() if est > 0]
    if measured:
        lower = max(lower, min(min(measured), delta))
    report.bracket = (lower, delta)
    if not exact:
        report.notes.append("bracket upper end is estimated")
    return lower, delta


def multiplicativity_residual(kappa_g, dim_g, kappa_h, dim_h, kappa_q, dim_q):
    """kappa(G)^dim G - kappa(H)^dim H * kappa(G/H)^dim(G/H); reported, never asserted."""
    return kappa_g ** dim_g - (kappa_h ** dim_h) * (kappa_q ** dim_q)


def diagonal_exponent_count(qs, N, L):
    """Independent count for diagonal maps x_t -> x_t^(q_t): distinct exponent tuples.

    The t-th coordinate contributes sums of distinct elements of
    {j * q_t^n : 0 <= n < N, 1 <= j < L}; the span is spanned by the
    resulting monomials, which are linearly independent.
    """
    total = 1
    for q in qs:
        sums = {0}
        for n in range(N):
            for j in range(1, L):
                sums |= {s + j * q ** n for s in sums}
        total *= len(sums)
    return total


def log_estimate(dim, d, N):
    return math.log(dim) / (d * N) if dim > 0 else float("-inf")
