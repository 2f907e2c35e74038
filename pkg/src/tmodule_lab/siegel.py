"""Auxiliary polynomials: a degree-bounded kernel solver over F_q[T],
the parameter bookkeeping for the delta_i, the builder for

    G_N(x) = sum_{u, l} c_{u,l} * u * Pi_N^l,

and hyperderivatives / vanishing orders at points.

The solver is a search, not a geometry-of-numbers bound: every unknown
c_l in F_q[T] with deg c_l <= B is written out in its F_p coordinates
and the resulting F_p-linear system is solved exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .heights import Place, valuation
from .linalg import clear_denominators, nullspace_mod_p
from .mpoly import MPoly, index_vectors, monomials_below
from .ore import IterateCache, TwistedOperator, compose
from .polys import FqPoly
from .ratfunc import RatFunc


class InfeasibleError(ValueError):
    """The requested construction does not fit its parameters or budget."""


# --- Siegel's lemma, search form ------------------------------------------

@dataclass
class LinSysA:
    """M x L matrix over F_q[T] and a degree bound B for the unknowns."""

    rows: list  # list of lists of FqPoly
    B: int

    def __post_init__(self):
        if self.B < 0:
            raise ValueError("degree bound must be >= 0")
        if not self.rows:
            raise ValueError("system needs at least one row")
        n = len(self.rows[0])
        if any(len(r) != n for r in self.rows):
            raise ValueError("ragged system")

    @property
    def ctx(self):
        return self.rows[0][0].ctx

    @property
    def M(self):
        return len(self.rows)

    @property
    def L(self):
        return len(self.rows[0])

    def height(self) -> int:
        """Largest entry degree (0 for the zero system)."""
        return max(0, max(a.degree() for r in self.rows for a in r))

    def unknown_count(self) -> int:
        return self.L * (self.B + 1) * self.ctx.m

    def equation_count(self) -> int:
        return self.M * (self.height() + self.B + 1) * self.ctx.m

    def apply(self, c):
        zero = FqPoly.zero(self.ctx)
        out = []
        for r in self.rows:
            acc = zero
            for a, x in zip(r, c):
                if not a.is_zero() and not x.is_zero():
                    acc = acc + a * x
            out.append(acc)
        return out

    def with_bound(self, B):
        return LinSysA(self.rows, B)


def _linearize(sys: LinSysA):
    ctx = sys.ctx
    p, m = ctx.p, ctx.m
    B, h = sys.B, sys.height()
    nexp = h + B + 1
    basis = [ctx.from_digits([1 if k == mu else 0 for k in range(m)]) for mu in range(m)]
    ncols = sys.L * (B + 1) * m
    nrows = sys.M * nexp * m
    mat = [[0] * ncols for _ in range(nrows)]
    for l in range(sys.L):
        for k in range(B + 1):
            for mu in range(m):
                col = (l * (B + 1) + k) * m + mu
                for i, r in enumerate(sys.rows):
                    a = r[l]
                    if a.is_zero():
                        continue
                    prod = a.scale(basis[mu]).shift(k)
                    for e, c in prod.terms.items():
                        for nu, dig in enumerate(ctx.digits(c)):
                            if dig:
                                mat[(i * nexp + e) * m + nu][col] = dig
    return mat, ncols


def _unlinearize(vec, sys: LinSysA):
    ctx = sys.ctx
    m, B = ctx.m, sys.B
    out = []
    for l in range(sys.L):
        terms = {}
        for k in range(B + 1):
            base = (l * (B + 1) + k) * m
            ds = [int(vec[base + mu]) for mu in range(m)]
            if any(ds):
                terms[k] = ctx.from_digits(ds)
        out.append(FqPoly(ctx, terms))
    return out


def siegel_kernel(sys: LinSysA):
    """Basis (over F_p) of all solutions c with deg c_l <= B, as FqPoly vectors."""
    mat, ncols = _linearize(sys)
    if not mat:
        mat = [[0] * ncols]
    basis, _ = nullspace_mod_p(mat, sys.ctx.p)
    return [_unlinearize(v, sys) for v in basis]


def siegel_solve(sys: LinSysA):
    """A nonzero c in F_q[T]^L with deg c_l <= B and sys * c = 0, or None.

    The first kernel basis vector is returned, so the answer is
    deterministic. The solution is checked by exact substitution.
    """
    kernel = siegel_kernel(sys)
    if not kernel:
        return None
    c = kernel[0]
    if any(not x.is_zero() for x in sys.apply(c)):
        raise AssertionError("kernel vector does not solve the system")
    if max(x.degree() for x in c) > sys.B:
        raise AssertionError("kernel vector exceeds the degree bound")
    return c


def min_bound_for_count(M: int, L: int, h: int) -> int:
    """Smallest B with L(B+1) > M(h+B+1), i.e. more F_p unknowns than equations."""
    if L <= M:
        raise InfeasibleError("need more unknowns than equations (L > M)")
    # (L - M)(B + 1) > M h
    return max(0, (M * h) // (L - M))


def dirichlet_prediction(M: int, L: int, h: int) -> float:
    """M h / (L - M): the degree Siegel's lemma guarantees for a solution."""
    if L <= M:
        return math.inf
    return M * h / (L - M)


def siegel_sweep(rows, B_max: int = 8):
    """Solve at B = 0, 1, ... and report the smallest B with a solution."""
    records = []
    smallest = None
    solution = None
    for B in range(B_max + 1):
        sys = LinSysA(rows, B)
        c = siegel_solve(sys)
        records.append({
            "B": B,
            "unknowns": sys.unknown_count(),
            "equations": sys.equation_count(),
            "feasible": c is not None,
        })
        if c is not None and smallest is None:
            smallest, solution = B, c
    sys = LinSysA(rows, 0)
    return {
        "M": sys.M,
        "L": sys.L,
        "height": sys.height(),
        "dirichlet": dirichlet_prediction(sys.M, sys.L, sys.height()),
        "smallest_B": smallest,
        "solution": solution,
        "records": records,
    }


# --- parameters ------------------------------------------------------------

def _lt_ppow(x: Fraction, p: int, rate: Fraction) -> bool:
    """x < p^rate, exactly (rate = s/t > 0, x > 0)."""
    s, t = rate.numerator, rate.denominator
    return x ** t < Fraction(p) ** s


def _gt_ppow(x: Fraction, p: int, rate: Fraction) -> bool:
    s, t = rate.numerator, rate.denominator
    return x ** t > Fraction(p) ** s


@dataclass
class ParamSet:
    """delta_1 .. delta_4, delta_plus and c, exact, checked against delta_lambda = p^rate.

    The required chain is

        1 < d4 < d3 < d2 < d1 < delta_lambda < d_plus,
        d2^(d+1) < d1^d d3,   d1 < d2 d4,

    and with ``full=True`` also d2 > d4^(d+1+c) and p^c > (d_plus delta_lambda^d)^d.
    """

    p: int
    d: int
    rate: Fraction
    d1: Fraction
    d2: Fraction
    d3: Fraction
    d4: Fraction
    d_plus: Fraction
    c: int = 0
    full: bool = False

    def __post_init__(self):
        for name in ("rate", "d1", "d2", "d3", "d4", "d_plus"):
            setattr(self, name, Fraction(getattr(self, name)))
        bad = self.violations()
        if bad:
            raise ValueError("parameter constraints violated: " + "; ".join(bad))

    def violations(self):
        p, d, r = self.p, self.d, self.rate
        d1, d2, d3, d4, dp = self.d1, self.d2, self.d3, self.d4, self.d_plus
        bad = []
        if r <= 0:
            bad.append("delta_lambda must exceed 1")
        if not (1 < d4 < d3 < d2 < d1):
            bad.append("need 1 < d4 < d3 < d2 < d1")
        if r > 0 and not _lt_ppow(d1, p, r):
            bad.append("need d1 < delta_lambda")
        if r > 0 and not _gt_ppow(dp, p, r):
            bad.append("need delta_lambda < d_plus")
        if not d2 ** (d + 1) < d1 ** d * d3:
            bad.append("need d2^(d+1) < d1^d d3")
        if not d1 < d2 * d4:
            bad.append("need d1 < d2 d4")
        if self.full:
            if self.c < 0 or not d2 > d4 ** (d + 1 + self.c):
                bad.append("need d2 > d4^(d+1+c)")
            # p^c > (dp * p^(r d))^d  <=>  p^(c t) > dp^(d t) p^(d^2 s)
            s, t = r.numerator, r.denominator
            if not Fraction(p) ** (self.c * t) > dp ** (d * t) * Fraction(p) ** (d * d * s):
                bad.append("need p^c > (d_plus delta_lambda^d)^d")
        return bad

    @property
    def delta_lambda(self) -> float:
        return self.p ** float(self.rate)

    def to_json(self):
        return {
            "p": self.p, "d": self.d, "rate": str(self.rate),
            "d1": str(self.d1), "d2": str(self.d2), "d3": str(self.d3),
            "d4": str(self.d4), "d_plus": str(self.d_plus), "c": self.c,
            "full": self.full,
        }

    @classmethod
    def from_json(cls, data):
        return cls(p=int(data["p"]), d=int(data["d"]), rate=Fraction(data["rate"]),
                   d1=Fraction(data["d1"]), d2=Fraction(data["d2"]), d3=Fraction(data["d3"]),
                   d4=Fraction(data["d4"]), d_plus=Fraction(data["d_plus"]),
                   c=int(data.get("c", 0)), full=bool(data.get("full", False)))


def _rational_below(p, rate, bits=20):
    x = Fraction(math.floor(p ** float(rate) * 2 ** bits), 2 ** bits)
    while not _lt_ppow(x, p, rate):
        x -= Fraction(1, 2 ** bits)
    return x


def _rational_above(p, rate, bits=20):
    x = Fraction(math.ceil(p ** float(rate) * 2 ** bits), 2 ** bits)
    while not _gt_ppow(x, p, rate):
        x += Fraction(1, 2 ** bits)
    return x


def _simple_between(a: Fraction, b: Fraction) -> Fraction:
    """A rational with small denominator strictly inside (a, b)."""
    mid = (a + b) / 2
    den = 2
    while True:
        x = mid.limit_denominator(den)
        if a < x < b:
            return x
        den *= 2


def pick_params(p: int, d: int, rate) -> ParamSet:
    """Choose parameters in the order d_plus, c, d2 (with d4), d1, d3.

    d_plus sits just above delta_lambda, c is the least integer with
    p^c > (d_plus delta_lambda^d)^d, d2 is a rational below delta_lambda and
    d4 is pushed toward 1 until d2 > d4^(d+1+c). Then d1 is the midpoint of
    (d2, min(delta_lambda, d2 d4)) and d3 the midpoint of
    (max(d4, d2^(d+1)/d1^d), d2).
    """
    rate = Fraction(rate)
    if rate <= 0:
        raise InfeasibleError("delta_lambda must exceed 1")
    d_plus = _rational_above(p, rate)
    s, t = rate.numerator, rate.denominator
    c = 0
    while not Fraction(p) ** (c * t) > d_plus ** (d * t) * Fraction(p) ** (d * d * s):
        c += 1
    below = _rational_below(p, rate)
    d2 = 1 + (below - 1) * Fraction(7, 8)
    eps = Fraction(1, 2)
    while not (1 + eps) ** (d + 1 + c) < d2:
        eps /= 2
    d4 = 1 + eps
    hi = min(below, d2 * d4)
    d1 = _simple_between(d2, hi)
    lo = max(d4, d2 ** (d + 1) / d1 ** d)
    d3 = _simple_between(lo, d2)
    return ParamSet(p=p, d=d, rate=rate, d1=d1, d2=d2, d3=d3, d4=d4,
                    d_plus=d_plus, c=c, full=True)


# --- hyperderivatives and vanishing orders ---------------------------------

def hyperderivative(G: MPoly, idx, Q) -> RatFunc:
    """Coefficient of z^idx in G(z + Q)."""
    idx = tuple(idx)
    if len(idx) != G.nvars:
        raise ValueError("index length must match the number of variables")
    return G.hyperderivative(idx).evaluate(tuple(Q))


def vanishing_order(G: MPoly, Q, max_order: int) -> int:
    """Least |i| with Delta_i(G)(Q) != 0, capped at max_order."""
    if G.is_zero():
        raise ValueError("the zero polynomial vanishes to every order")
    Q = tuple(Q)
    if all(x.is_zero() for x in Q):
        return min(G.low_degree(), max_order)
    for t in range(max_order):
        for idx in index_vectors(G.nvars, t):
            if not hyperderivative(G, idx, Q).is_zero():
                return t
    return max_order


def v0_order_table(G: MPoly, Q, v0: Place, max_index: int = 0):
    """Rows (i, ord_v0 Delta_i(G)(Q), required T - |i|) for |i| <= max_index."""
    if v0.is_infinite:
        raise ValueError("v0 must be a finite place")
    Q = tuple(Q)
    for x in Q:
        if valuation(x, v0) < 1:
            raise ValueError(f"component {x} is not in the maximal ideal at {v0}")
    for c in G.terms.values():
        if valuation(c, v0) < 0:
            raise ValueError(f"coefficient {c} is not integral at {v0}")
    T = G.low_degree()
    rows = []
    for t in range(max_index + 1):
        for idx in index_vectors(G.nvars, t):
            val = valuation(hyperderivative(G, idx, Q), v0)
            rows.append((idx, val, T - t))
    return rows


def v0_order_lower_bound_check(G, Q, v0: Place, max_index: int = 0) -> bool:
    """ord_v0 Delta_i(G)(Q) >= T - |i| for |i| <= max_index, T the order of G at 0."""
    if isinstance(G, AuxPolynomial):
        G = G.G
    return all(val >= need for _, val, need in v0_order_table(G, Q, v0, max_index))


# --- the auxiliary polynomial -------------------------------------------------

@dataclass
class AuxPolynomial:
    G: MPoly
    monomials: list  # U_N as exponent tuples
    ell_count: int
    target_order: int
    coeffs: dict  # (u, l) -> FqPoly
    B: int
    order_at_zero: int
    coeff_height: int
    height_target: float | None = None
    params: dict | None = None
    pi: MPoly | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> str:
        data = {
            "G": self.G.to_json(),
            "nvars": self.G.nvars,
            "monomials": [list(u) for u in self.monomials],
            "ell_count": self.ell_count,
            "target_order": self.target_order,
            "coefficients": {
                f"{','.join(map(str, u))};{l}": str(c)
                for (u, l), c in sorted(self.coeffs.items())
            },
            "B": self.B,
            "order_at_zero": self.order_at_zero,
            "coeff_height": self.coeff_height,
            "height_target": self.height_target,
            "params": self.params,
            "Pi": None if self.pi is None else self.pi.to_json(),
            "notes": self.notes,
        }
        return json.dumps(data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, ctx, text):
        data = json.loads(text)
        from .parsing import parse_poly

        n = data["nvars"]
        coeffs = {}
        for key, v in data["coefficients"].items():
            u, l = key.split(";")
            u = tuple(int(x) for x in u.split(",")) if u else ()
            coeffs[(u, int(l))] = parse_poly(ctx, v)
        return cls(
            G=MPoly.from_json(ctx, n, data["G"]),
            monomials=[tuple(u) for u in data["monomials"]],
            ell_count=data["ell_count"],
            target_order=data["target_order"],
            coeffs=coeffs,
            B=data["B"],
            order_at_zero=data["order_at_zero"],
            coeff_height=data["coeff_height"],
            height_target=data["height_target"],
            params=data["params"],
            pi=None if data["Pi"] is None else MPoly.from_json(ctx, n, data["Pi"]),
            notes=data["notes"],
        )


def _ceil_power(x: Fraction, N: int) -> int:
    v = x ** N
    return -((-v.numerator) // v.denominator)


def build_aux_basic(F: TwistedOperator, lam: TwistedOperator | None, params: ParamSet | None, N: int,
                    target_order: int | None = None, u_degree: int | None = None,
                    ell_count: int | None = None, B_max: int = 6, budget: int = 500) -> AuxPolynomial:
    """A nonzero G = sum c_{u,l} u Pi_N^l vanishing to order >= target at 0.

    Pi_N is the pullback of lambda o F^N. By default U_N is the monomials of
    degree < ceil(d1^N), l < ceil(d4^(dN)) and the target is
    ceil((d2 d4)^N); each of these can be overridden to reach the toy
    regime. The coefficients c_{u,l} are searched in F_q[T] with degree
    bound B = 0, 1, ..., B_max; the first B with a kernel vector giving a
    nonzero G wins.
    """
    if N < 0:
        raise ValueError("N must be >= 0")
    d = F.in_dim
    lam = lam if lam is not None else TwistedOperator.identity(F.ctx, d).row(0)
    if lam.in_dim != d or lam.out_dim != 1:
        raise ValueError("lambda must be a 1 x d operator")
    ctx = F.ctx
    if params is None and None in (target_order, u_degree, ell_count):
        raise InfeasibleError("without parameters every size must be given explicitly")
    if target_order is None:
        target_order = _ceil_power(params.d2 * params.d4, N)
    if u_degree is None:
        u_degree = _ceil_power(params.d1, N)
    if ell_count is None:
        ell_count = _ceil_power(params.d4, d * N)
    if target_order < 1 or u_degree < 1 or ell_count < 1:
        raise InfeasibleError("sizes must be positive")
    U = monomials_below(d, u_degree)
    n_unknowns = len(U) * ell_count
    if n_unknowns > budget:
        raise InfeasibleError(f"{n_unknowns} unknowns exceed the budget of {budget}")

    Pi = compose(lam, IterateCache(F).get(N)).pullback()[0]
    one = MPoly.constant(ctx, d, RatFunc.one(ctx))
    powers = [one]
    for _ in range(1, ell_count):
        powers.append(powers[-1].mul(Pi))
    funcs, labels = [], []
    for u in U:
        mono = MPoly.monomial(ctx, u)
        for l in range(ell_count):
            funcs.append(mono.mul(powers[l]))
            labels.append((u, l))

    # one equation per monomial of degree < target: its coefficient in G vanishes
    low = sorted({e for f in funcs for e in f.terms if sum(e) < target_order})
    zero = FqPoly.zero(ctx)
    rows = []
    for e in low:
        row = [f.terms.get(e) for f in funcs]
        row = [RatFunc.zero(ctx) if x is None else x for x in row]
        rows.append(clear_denominators(row))
    if not rows:
        rows = [[zero] * len(funcs)]

    notes = []
    for B in range(B_max + 1):
        sys = LinSysA(rows, B)
        for c in siegel_kernel(sys):
            G = MPoly.zero(ctx, d)
            for x, f in zip(c, funcs):
                if not x.is_zero():
                    G = G + f.scale(RatFunc(x))
            if G.is_zero():
                continue
            order = G.low_degree()
            if order < target_order:
                raise AssertionError("kernel vector fails the vanishing conditions")
            coeffs = {lab: x for lab, x in zip(labels, c) if not x.is_zero()}
            ch = max(x.degree() for x in coeffs.values())
            target_h = float((params.d3 * params.d4) ** N) if params is not None else None
            if target_h is not None and ch >= target_h:
                notes.append("coefficient heights exceed the (d3 d4)^N target at this N")
            if params is not None and (u_degree, ell_count, target_order) != (
                    _ceil_power(params.d1, N), _ceil_power(params.d4, d * N),
                    _ceil_power(params.d2 * params.d4, N)):
                notes.append("sizes overridden; toy regime")
            return AuxPolynomial(
                G=G, monomials=U, ell_count=ell_count, target_order=target_order,
                coeffs=coeffs, B=B, order_at_zero=order, coeff_height=ch,
                height_target=target_h,
                params=None if params is None else params.to_json(), pi=Pi, notes=notes,
            )
    raise InfeasibleError(
        f"no nonzero G with coefficient degree <= {B_max} "
        f"({n_unknowns} unknowns, {len(low)} vanishing conditions)"
    )
