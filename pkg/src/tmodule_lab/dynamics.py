"""Orbits, degree sequences, height growth, and reduction modulo a place.

Degree and height sequences only need degrees of polynomials, so when
every entry of F, lambda and P lies in F_q[T] they are computed on jets
(see ``jets``), retrying with a wider window whenever cancellation makes
a degree undecidable. Anything with genuine denominators runs on exact
rational functions.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .heights import Place, height_tuple, valuation
from .jets import DEFAULT_WINDOW, Jet, PrecisionLost
from .ore import IterateCache, TwistedOperator, compose, evaluate, point_sub
from .polys import FqPoly, poly_xgcd
from .ratfunc import RatFunc

MAX_WINDOW = 4096


class NotIntegralError(ValueError):
    """Input is not integral at the requested place."""


def _with_window(fn, integral: bool, window=DEFAULT_WINDOW):
    if not integral:
        return fn(None)
    w = window
    while True:
        try:
            return fn(w)
        except PrecisionLost:
            if w >= MAX_WINDOW:
                raise
            w *= 4


def _point_integral(P) -> bool:
    return all(x.is_poly() for x in P)


def _jet_point(P, w):
    return tuple(Jet.from_ratfunc(x, w) for x in P)


def _entry_height(x) -> int:
    if isinstance(x, Jet):
        return x.height()
    return height_tuple([x])


def _max_height(jets) -> int:
    """max of the heights of polynomial jets, certified.

    An entry whose known terms all cancelled only has an upper bound; it
    cannot change the maximum when that bound is no larger than the
    certified heights of the others.
    """
    known, unknown = 0, 0
    for v in jets:
        lo, hi = v.height_bounds()
        if lo == hi:
            known = max(known, lo)
        else:
            unknown = max(unknown, hi)
    if unknown > known:
        raise PrecisionLost("an undecided entry may carry the maximum height")
    return known


def _tuple_height(values) -> int:
    values = list(values)
    if values and isinstance(values[0], Jet):
        return _max_height(values)
    return height_tuple(values)


def _op_height(F: TwistedOperator) -> int:
    entries = list(F.entries())
    if not entries:
        return 0
    return _tuple_height(entries)


# --- orbits ---------------------------------------------------------------

def orbit(F: TwistedOperator, P, N: int):
    """[P, F(P), ..., F^N(P)] by repeated evaluation."""
    if not F.is_square():
        raise ValueError("orbit needs a square operator")
    if len(P) != F.in_dim:
        raise ValueError("point dimension mismatch")
    pts = [tuple(P)]
    for _ in range(N):
        pts.append(evaluate(F, pts[-1]))
    return pts


# --- progression detection -------------------------------------------------

def detect_progression(seq, min_periods: int = 3):
    """Find (s, period, n0) with seq[n + period] - seq[n] == s for all n >= n0.

    ``seq`` is indexed from 0. The window must contain at least
    ``min_periods`` full periods past n0. Smallest period wins, then
    smallest n0.
    """
    N = len(seq) - 1
    for period in range(1, N // min_periods + 1):
        for n0 in range(0, N - min_periods * period + 1):
            diffs = {seq[n + period] - seq[n] for n in range(n0, N - period + 1)}
            if len(diffs) == 1:
                return diffs.pop(), period, n0
    return None


@dataclass
class GrowthReport:
    p: int
    q: int
    kind: str
    rows: list = field(default_factory=list)  # (n, tau degree or None, height or None)
    exact_rate: Fraction | None = None
    rate_period: int | None = None
    rate_start: int | None = None
    heuristic: bool = True
    root_estimates: dict = field(default_factory=dict)
    ratio_estimates: dict = field(default_factory=dict)
    canonical_proxy: dict = field(default_factory=dict)
    bounds: dict = field(default_factory=dict)
    restupper_ok: bool | None = None
    upper_only: list = field(default_factory=list)  # rows whose height is only an upper bound
    notes: list = field(default_factory=list)

    @property
    def delta(self):
        """p^exact_rate when a rate was detected."""
        if self.exact_rate is None:
            return None
        return self.p ** float(self.exact_rate)

    def tau_degrees(self):
        return [t for _, t, _ in self.rows]

    def heights(self):
        return [h for _, _, h in self.rows]

    def alpha_estimate(self):
        """max(1, h_N^(1/N)) at the last row; bounded heights give 1."""
        n, _, h = self.rows[-1]
        if n == 0 or not h:
            return 1.0
        return max(1.0, h ** (1.0 / n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# q={self.q} p={self.p} heights in units of log q\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "tdeg", "height"])
        for n, t, h in self.rows:
            w.writerow([n, "" if t is None else t, "" if h is None else h])
        return buf.getvalue()

    def summary(self) -> dict:
        out = {
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "exact_rate": None if self.exact_rate is None else str(self.exact_rate),
            "rate_period": self.rate_period,
            "rate_start": self.rate_start,
            "delta": self.delta,
            "heuristic": self.heuristic,
            "root_estimates": {str(k): v for k, v in self.root_estimates.items()},
            "ratio_estimates": {str(k): v for k, v in self.ratio_estimates.items()},
            "canonical_proxy": {str(k): v for k, v in self.canonical_proxy.items()},
            "restupper_ok": self.restupper_ok,
            "upper_only": list(self.upper_only),
            "notes": list(self.notes),
        }
        if self.kind == "arithmetic":
            out["alpha_estimate"] = self.alpha_estimate()
        return out

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _degree_report(kind, F, seq, N_max, extra):
    rep = GrowthReport(p=F.p, q=F.ctx.q, kind=kind)
    rep.rows = [(n, seq[n], None) for n in range(N_max + 1)]
    for n in range(1, N_max + 1):
        if seq[n] >= 0:
            rep.root_estimates[n] = F.p ** (seq[n] / n)
    for n in range(N_max):
        if seq[n] >= 0 and seq[n + 1] >= 0:
            rep.ratio_estimates[n] = F.p ** (seq[n + 1] - seq[n])
    found = detect_progression(seq[: N_max + 1])
    if found is not None:
        s, period, n0 = found
        ok = all(seq[n] == seq[n - period] + s for n in range(N_max + 1, N_max + extra + 1))
        if ok:
            rep.exact_rate = Fraction(s, period)
            rep.rate_period, rep.rate_start = period, n0
            rep.notes.append(
                f"tau-degree increases by {s} every {period} steps from n={n0}; "
                f"confirmed on {extra} further iterates (progression detection is heuristic)"
            )
        else:
            rep.notes.append("progression found in window but not confirmed beyond it")
    else:
        rep.notes.append("no eventual arithmetic progression detected")
    return rep


def tau_degree_sequence(F: TwistedOperator, N: int, lam: TwistedOperator | None = None):
    """t(n) = tau-degree of F^n (or of lambda o F^n) for n = 0..N; -1 marks zero."""

    def run(w):
        G = F.to_jets(w) if w else F
        if lam is None:
            cache = IterateCache(G)
            return [cache.get(n).tau_degree for n in range(N + 1)]
        L = lam.to_jets(w) if w else lam
        out = []
        for _ in range(N + 1):
            out.append(L.tau_degree)
            L = compose(L, G)
        return out

    integral = F.is_integral() and (lam is None or lam.is_integral())
    return _with_window(run, integral)


def dynamic_degree(F: TwistedOperator, N_max: int, extra: int = 3) -> GrowthReport:
    """tau-degrees of F^n, with delta = p^(s/t0) when t(n) is eventually arithmetic."""
    if not F.is_square() or F.is_zero():
        raise ValueError("need a nonzero square operator")
    seq = tau_degree_sequence(F, N_max + extra)
    return _degree_report("dynamic", F, seq, N_max, extra)


def restricted_degree(F: TwistedOperator, lam: TwistedOperator, N_max: int, extra: int = 3) -> GrowthReport:
    """The same for lambda o F^n (delta_lambda)."""
    if lam.in_dim != F.out_dim:
        raise ValueError("lambda dimension mismatch")
    seq = tau_degree_sequence(F, N_max + extra, lam)
    return _degree_report("restricted", F, seq, N_max, extra)


def _height_bounds(values):
    """(lo, hi) for the height of a tuple; lo == hi unless a jet lost its terms."""
    values = list(values)
    if not values or not isinstance(values[0], Jet):
        h = height_tuple(values) if values else 0
        return h, h
    lo = hi = 0
    for v in values:
        a, b = v.height_bounds()
        lo, hi = max(lo, a), max(hi, b)
    return lo, hi


def _height_rows(F, P, lam, N):
    """For n = 0..N: (tdeg of lambda o F^n, h(lambda(F^n P)), h(coefficients of lambda o F^n), exact).

    Cancellation can push a height below what the widest window sees; the
    row then carries a certified upper bound and ``exact`` is False.
    """

    def run(w, last):
        G = F.to_jets(w) if w else F
        lam0 = lam if lam is not None else TwistedOperator.identity(F.ctx, F.in_dim)
        lam0 = lam0.to_jets(w) if w else lam0
        Ln = lam0
        pt = _jet_point(P, w) if w else tuple(P)
        rows = []
        for _ in range(N + 1):
            hlo, hhi = _height_bounds(evaluate(lam0, pt))
            clo, chi = _height_bounds(Ln.entries())
            if not last and (hlo != hhi or clo != chi):
                raise PrecisionLost("height undecided at this window")
            rows.append((Ln.tau_degree, hhi, chi, hlo == hhi))
            pt = evaluate(G, pt)
            Ln = compose(Ln, G)
        return rows

    integral = F.is_integral() and _point_integral(P) and (lam is None or lam.is_integral())
    if not integral:
        return run(None, True)
    w = DEFAULT_WINDOW
    while True:
        try:
            return run(w, w >= MAX_WINDOW)
        except PrecisionLost:
            if w >= MAX_WINDOW:
                raise
            w *= 4


def arithmetic_degree(F: TwistedOperator, P, lam: TwistedOperator | None = None,
                      N_max: int = 10, extra: int = 3) -> GrowthReport:
    """Heights h_n = h(F^n P) (or h(lambda(F^n P))) with growth estimators.

    Every row is checked against the exact upper bound
    h_n <= h(coefficients of lambda o F^n) + p^(tdeg) h(P).
    """
    if not F.is_square():
        raise ValueError("need a square operator")
    rows = _height_rows(F, P, lam, N_max)
    hP = height_tuple(P)
    p = F.p
    rep = GrowthReport(p=p, q=F.ctx.q, kind="arithmetic")
    rep.rows = [(n, t, h) for n, (t, h, _, _) in enumerate(rows)]
    rep.upper_only = [n for n, r in enumerate(rows) if not r[3]]
    if rep.upper_only:
        rep.notes.append(
            "cancellation beyond the widest window: heights at n = "
            + ", ".join(map(str, rep.upper_only)) + " are certified upper bounds"
        )
    ok = True
    for n, (t, h, hc, _) in enumerate(rows):
        bound = hc + (p ** t) * hP if t >= 0 else 0
        rep.bounds[n] = bound
        if h > bound:
            ok = False
    rep.restupper_ok = ok
    for n in range(1, N_max + 1):
        h = rows[n][1]
        if h > 0:
            rep.root_estimates[n] = h ** (1.0 / n)
    for n in range(N_max):
        if rows[n][1] > 0:
            rep.ratio_estimates[n] = rows[n + 1][1] / rows[n][1]
    degrep = (restricted_degree(F, lam, N_max, extra) if lam is not None
              else dynamic_degree(F, N_max, extra))
    rep.exact_rate = degrep.exact_rate
    rep.rate_period, rep.rate_start = degrep.rate_period, degrep.rate_start
    if rep.exact_rate is not None:
        delta = p ** float(rep.exact_rate)
        for n in range(N_max + 1):
            rep.canonical_proxy[n] = rows[n][1] / delta ** n
    rep.notes.append("alpha is a limsup; estimates only")
    return rep


def restupper_window(rep: GrowthReport, n_from: int = 8, eps: float = 0.25):
    """Rows n >= n_from where h_n^(1/n) > delta_lambda (1 + eps); empty means no violation."""
    if rep.exact_rate is None:
        raise ValueError("delta_lambda not exactly known")
    delta = rep.p ** float(rep.exact_rate)
    bad = []
    for n, _, h in rep.rows:
        if n >= n_from and h > 0 and h ** (1.0 / n) > delta * (1 + eps):
            bad.append((n, h))
    return bad


# --- coefficient heights ----------------------------------------------------

@dataclass
class TruncboundResult:
    ok: bool
    C: int
    margin: float
    violations: list
    per_n: dict            # n -> max_i h(A_{n,i}) / (n p^i)
    literal: dict          # n -> (max height over monomials of degree <= s^n, s_plus^n)


def truncbound_check(F: TwistedOperator, N_max: int, s: float = 1.0, s_plus: float = 2.0) -> TruncboundResult:
    """Check h(entries of A_{n,i}) <= C n p^i for every iterate n <= N_max.

    C is the largest height of an entry of A_0..A_r. Also records, per n,
    the literal form: the largest height among coefficients of monomials
    of degree <= s^n, next to s_plus^n.
    """
    if not (1 <= s < s_plus):
        raise ValueError("need 1 <= s < s_plus")
    if not F.is_square():
        raise ValueError("need a square operator")

    def run(w):
        G = F.to_jets(w) if w else F
        C = max([0] + [_entry_height(x) for x in G.entries()])
        cache = IterateCache(G)
        p = F.p
        violations, per_n, literal = [], {}, {}
        margin = 0.0
        for n in range(1, N_max + 1):
            Fn = cache.get(n)
            worst = 0.0
            lit = 0
            for i, m in enumerate(Fn.coeffs):
                hmax = _tuple_height([x for row in m for x in row])
                if hmax > C * n * p ** i:
                    violations.append((n, i, hmax, C * n * p ** i))
                ratio = hmax / (n * p ** i)
                worst = max(worst, ratio)
                if p ** i <= s ** n:
                    lit = max(lit, hmax)
            per_n[n] = worst
            literal[n] = (lit, s_plus ** n)
            margin = max(margin, worst)
        return TruncboundResult(not violations, C, margin, violations, per_n, literal)

    return _with_window(run, F.is_integral())


# --- reduction modulo a place ----------------------------------------------

def residue(a: RatFunc, v: Place) -> FqPoly:
    """Image of a v-integral element in k(v) = F_q[T]/(pi), as a reduced polynomial."""
    pi = v.poly
    if valuation(a, v) < 0:
        raise NotIntegralError(f"{a} has a pole at {v}")
    num = a.num % pi
    den = a.den % pi
    if den.is_one():
        return num
    g, s, _ = poly_xgcd(den, pi)
    return (num * s) % pi


@dataclass
class ReductionReport:
    place: Place
    residues: list
    s1: int
    s2: int
    Q: tuple
    q_valuations: list

    def summary(self):
        return {
            "place": str(self.place),
            "s1": self.s1,
            "s2": self.s2,
            "Q": [str(x) for x in self.Q],
            "valuations": [v if v != math.inf else "inf" for v in self.q_valuations],
            "residue_orbit": [[str(r) for r in pt] for pt in self.residues],
        }


class ShiftTooCostly(ValueError):
    """The residue cycle was found but s2 is past the exact-evaluation limit."""

    def __init__(self, s1, s2, limit):
        self.s1, self.s2 = s1, s2
        super().__init__(f"residues repeat at s1={s1}, s2={s2}; exact shift skipped (limit {limit})")


def reduce_and_shift(F: TwistedOperator, P, v0: Place, max_steps: int | None = None) -> ReductionReport:
    """Pigeonhole in G_a^d(k(v0)): find s1 < s2 with (F^s2 - F^s1)(P) in m_v0^d.

    The exact point F^s2(P) has height about p^(r s2); ``max_steps`` caps s2
    and raises ShiftTooCostly instead of computing it.
    """
    if v0.is_infinite:
        raise ValueError("v0 must be a finite place")
    for x in list(P) + list(F.entries()):
        if valuation(x, v0) < 0:
            raise NotIntegralError(f"{x} is not integral at {v0}")
    pi = v0.poly
    red = [tuple(tuple(residue(x, v0) for x in row) for row in m) for m in F.coeffs]

    def step(pt):
        out = []
        for i in range(F.out_dim):
            acc = FqPoly.zero(F.ctx)
            for k, m in enumerate(red):
                for c in range(F.in_dim):
                    a = m[i][c]
                    if a:
                        acc = acc + a * pt[c].frobenius(k)
            out.append(acc % pi)
        return tuple(out)

    cur = tuple(residue(x, v0) for x in P)
    seen = {cur: 0}
    residues = [cur]
    s = 0
    while True:
        cur = step(cur)
        s += 1
        if cur in seen:
            s1, s2 = seen[cur], s
            break
        seen[cur] = s
        residues.append(cur)
    if max_steps is not None and s2 > max_steps:
        raise ShiftTooCostly(s1, s2, max_steps)
    pts = orbit(F, P, s2)
    Q = point_sub(pts[s2], pts[s1])
    vals = [valuation(x, v0) for x in Q]
    if any(v < 1 for v in vals):
        raise AssertionError("shifted point is not in the maximal ideal")
    return ReductionReport(v0, residues, s1, s2, Q, vals)


# --- preperiodicity -------------------------------------------------------

@dataclass
class ProbeResult:
    status: str                  # "preperiodic", "escaping", "inconclusive"
    preperiod: int | None = None
    period: int | None = None
    escape_n: int | None = None
    monotone: bool | None = None
    heights: list = field(default_factory=list)

    def summary(self):
        return {
            "status": self.status,
            "preperiod": self.preperiod,
            "period": self.period,
            "escape_n": self.escape_n,
            "monotone": self.monotone,
            "heights": list(self.heights),
        }


def preperiodicity_probe(F: TwistedOperator, P, N_max: int, height_cap: int) -> ProbeResult:
    """Look for an exact repeat F^a P = F^b P (a < b <= N_max) before heights pass the cap."""
    pt = tuple(P)
    seen = {pt: 0}
    heights = [height_tuple(pt)]
    for n in range(1, N_max + 1):
        pt = evaluate(F, pt)
        h = height_tuple(pt)
        heights.append(h)
        if pt in seen:
            a = seen[pt]
            return ProbeResult("preperiodic", a, n - a, heights=heights)
        seen[pt] = n
        if h > height_cap:
            mono = all(x <= y for x, y in zip(heights, heights[1:]))
            return ProbeResult("escaping", escape_n=n, monotone=mono, heights=heights)
    return ProbeResult("inconclusive", heights=heights)
