"""Command line runner: ``tmlab <subcommand> --config FILE [--out DIR] [--seed N]``.

Each subcommand runs one library operation on the configured t-module,
writes ``<out>/<subcommand>.csv`` and ``<out>/<subcommand>.json`` and
records its verdicts in ``<out>/verdicts.json``. The exit status is 1 if
any pass/fail verdict failed, 2 for configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from dataclasses import asdict, dataclass, field

from .config import ConfigError, ExperimentConfig, load_config
from .dynamics import (
    arithmetic_degree, dynamic_degree, orbit, preperiodicity_probe,
    reduce_and_shift, restricted_degree, truncbound_check,
)
from .heights import (
    Place, height_tuple, height_tuple_slow, product_formula_terms,
)
from .ore import TwistedOperator, gamma_set, stability_check
from .polys import FqPoly, irreducibles
from .ratfunc import RatFunc
from .saturation import kappa_bracket, saturation_table
from .siegel import (
    InfeasibleError, LinSysA, build_aux_basic, min_bound_for_count, pick_params,
    siegel_sweep, v0_order_table,
)


@dataclass
class VerdictRecord:
    experiment: str
    anchor: str
    status: str  # "pass", "fail" or "data"
    detail: str = ""
    artifacts: list = field(default_factory=list)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _num(x):
    # JSON-safe numbers: infinities become strings, floats are rounded for stable output
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return round(x, 12)
    return x


def _require(cfg, what):
    val = getattr(cfg, what)
    if val is None:
        key = {"P": "point", "lam": "lambda"}.get(what, what)
        raise ConfigError(f"this command needs '{key}' in the config")
    return val


class Result:
    def __init__(self, header):
        self.header = header
        self.rows = []
        self.data = {}
        self.verdicts = []

    def verdict(self, anchor, status, detail=""):
        self.verdicts.append((anchor, status, detail))


# --- subcommands ------------------------------------------------------------

def cmd_delta(cfg: ExperimentConfig, seed):
    rep = dynamic_degree(cfg.F, cfg.param("N_max", 12), cfg.param("extra", 3))
    res = Result(["n", "tdeg"])
    res.rows = [[n, t] for n, t, _ in rep.rows]
    res.data = rep.summary()
    _expect_rate(cfg, rep, res, "Definition of the dynamic degree")
    return res


def cmd_delta_lambda(cfg, seed):
    lam = _require(cfg, "lam")
    rep = restricted_degree(cfg.F, lam, cfg.param("N_max", 12), cfg.param("extra", 3))
    res = Result(["n", "tdeg"])
    res.rows = [[n, t] for n, t, _ in rep.rows]
    res.data = rep.summary()
    _expect_rate(cfg, rep, res, "Definition of the restricted degree")
    return res


def _expect_rate(cfg, rep, res, anchor):
    want = cfg.expect.get("exact_rate")
    got = None if rep.exact_rate is None else str(rep.exact_rate)
    if want is not None:
        res.verdict(anchor, _status(got == str(want)), f"exact_rate {got}, expected {want}")
    else:
        res.verdict(anchor, "data", f"exact_rate {got}, delta {rep.delta}")


def cmd_alpha(cfg, seed):
    P = _require(cfg, "P")
    N = cfg.param("N_max", 10)
    rep = arithmetic_degree(cfg.F, P, cfg.lam, N)
    res = Result(["n", "tdeg", "height", "bound", "height_exact"])
    res.rows = [[n, t, h, rep.bounds[n], n not in rep.upper_only] for n, t, h in rep.rows]
    res.data = rep.summary()
    res.data["bounds"] = {str(k): v for k, v in rep.bounds.items()}
    res.verdict("Corollary restupper (integer form)", _status(rep.restupper_ok),
                "h(lambda(F^n P)) <= h(lambda o F^n) + p^t(n) h(P) for all n")
    hs = rep.heights()
    half = len(hs) // 2
    if max(hs[half:]) <= max(hs[:half + 1]):
        res.verdict("Definition of the arithmetic degree", "data", "bounded heights")
    else:
        res.verdict("Definition of the arithmetic degree", "data",
                    f"alpha estimate {rep.alpha_estimate():.6f}")
    return res


def cmd_orbit(cfg, seed):
    P = _require(cfg, "P")
    N = cfg.param("N_max", 6)
    pts = orbit(cfg.F, P, N)
    d = cfg.F.in_dim
    res = Result(["n"] + [f"x{i + 1}" for i in range(d)] + ["height"])
    for n, pt in enumerate(pts):
        res.rows.append([n] + [str(x) for x in pt] + [height_tuple(pt)])
    res.data = {"heights": [r[-1] for r in res.rows]}
    res.verdict("Orbit of P", "data", f"{N} iterates")
    return res


def cmd_height(cfg, seed):
    P = _require(cfg, "P")
    fast, slow = height_tuple(P), height_tuple_slow(P)
    res = Result(["point", "fast", "by_places"])
    res.rows = [[" ; ".join(str(x) for x in P), fast, slow]]
    res.data = {"fast": fast, "by_places": slow, "log_units": f"log q, q={cfg.ctx.q}"}
    res.verdict("Definition of the Weil height", _status(fast == slow),
                f"fast path {fast}, place-by-place {slow}")
    return res


def cmd_truncbound(cfg, seed):
    N = cfg.param("N_max", 10)
    tb = truncbound_check(cfg.F, N, float(cfg.param("s", 1.0)), float(cfg.param("s_plus", 2.0)))
    res = Result(["n", "max_ratio", "literal_height", "literal_bound"])
    for n in sorted(tb.per_n):
        lit, bound = tb.literal[n]
        res.rows.append([n, _num(tb.per_n[n]), lit, _num(bound)])
    res.data = {"C": tb.C, "margin": _num(tb.margin), "violations": [list(v) for v in tb.violations]}
    res.verdict("Lemma truncbound (integer form)", _status(tb.ok),
                f"h(A_(n,i)) <= C n p^i with C = {tb.C}, n <= {N}")
    return res


def cmd_kappa(cfg, seed):
    Ns = cfg.param("N", [1, 2])
    Ls = cfg.param("L", [2, 3])
    Ns = list(range(1, Ns + 1)) if isinstance(Ns, int) else Ns
    Ls = list(range(2, Ls + 1)) if isinstance(Ls, int) else Ls
    rep = saturation_table(cfg.F, Ns, Ls, cfg.param("degree_cap", None), cfg.param("budget", 5000))
    lower, upper = kappa_bracket(cfg.F, rep)
    res = Result(["N", "L", "degree_cap", "dim", "estimate", "lower_bound_only"])
    for r in rep.rows():
        res.rows.append([r["N"], r["L"], r["degree_cap"], r["dim"], _num(r["estimate"]), r["lower_bound_only"]])
    res.data = json.loads(rep.to_json())
    res.data["bracket"] = [_num(lower), _num(upper)]
    ok = rep.is_monotone() and all(rep.dims[k] <= rep.counting_bound[k] for k in rep.dims)
    res.verdict("Definition of the saturation degree", _status(ok),
                "dimensions monotone in N and L and within the monomial count")
    res.verdict("delta^(1/d) <= kappa <= delta", "data",
                f"bracket [{lower:.6f}, {upper:.6f}] (estimate)")
    if cfg.preset == "diagonal":
        from .saturation import diagonal_exponent_count

        qs = cfg.preset_args["q"]
        agree = all(rep.dims[(N, L)] == diagonal_exponent_count(qs, N, L) for N, L in rep.dims
                    if not rep.truncated[(N, L)])
        res.verdict("Diagonal example of the saturation degree", _status(agree),
                    "span dimension equals the exponent-tuple count")
    return res


def _random_system(rng, ctx, M, L, deg):
    return [[FqPoly(ctx, {e: rng.randrange(ctx.q) for e in range(deg + 1)}) for _ in range(L)]
            for _ in range(M)]


def cmd_siegel_demo(cfg, seed):
    rng = random.Random(seed)
    ctx = cfg.ctx
    count = cfg.param("systems", 10)
    res = Result(["system", "M", "L", "height", "dirichlet", "smallest_B", "count_bound", "verified"])
    all_ok = True
    for k in range(count):
        M = rng.randint(1, cfg.param("M_max", 3))
        L = rng.randint(M + 1, max(M + 1, cfg.param("L_max", 8)))
        rows = _random_system(rng, ctx, M, L, cfg.param("entry_degree", 2))
        h = LinSysA(rows, 0).height()
        bound = min_bound_for_count(M, L, h)
        sw = siegel_sweep(rows, bound)
        c = sw["solution"]
        ok = c is not None and all(x.is_zero() for x in LinSysA(rows, bound).apply(c))
        all_ok &= ok
        res.rows.append([k, M, L, h, _num(sw["dirichlet"]), sw["smallest_B"], bound, ok])
    res.data = {"systems": count}
    res.verdict("Lemma siegel (search form)", _status(all_ok),
                "a nonzero solution exists once unknowns outnumber equations")
    return res


def cmd_aux_build(cfg, seed):
    F = cfg.F
    N = cfg.param("N", 1)
    params = cfg.paramset
    sizes = [cfg.param(k, None) for k in ("target_order", "u_degree", "ell_count")]
    # an infeasible construction means the inputs miss its hypotheses: exit 2, not a failed check
    if params is None and None in sizes:
        rate = cfg.param("rate", None)
        if rate is None:
            lam = cfg.lam or TwistedOperator.identity(F.ctx, F.in_dim).row(0)
            rate = restricted_degree(F, lam, cfg.param("N_max", 12)).exact_rate
            if rate is None:
                raise InfeasibleError("delta_lambda not detected; give 'rate' or a paramset")
        params = pick_params(F.p, F.in_dim, rate)
    aux = build_aux_basic(
        F, cfg.lam, params, N,
        target_order=sizes[0], u_degree=sizes[1], ell_count=sizes[2],
        B_max=cfg.param("B_max", 6), budget=cfg.param("budget", 500),
    )
    res = Result(["monomial", "coefficient"])
    for e in sorted(aux.G.terms):
        res.rows.append([",".join(map(str, e)), str(aux.G.terms[e])])
    res.data = json.loads(aux.to_json())
    res.verdict("Lemma siegel (auxiliary polynomial)", _status(aux.order_at_zero >= aux.target_order),
                f"order at 0 is {aux.order_at_zero}, target {aux.target_order}")
    if cfg.P is not None:
        from .dynamics import NotIntegralError, ShiftTooCostly

        for v0 in cfg.places:
            try:
                red = reduce_and_shift(F, cfg.P, v0, cfg.param("max_steps", 40))
            except (NotIntegralError, ShiftTooCostly) as e:
                res.data.setdefault("v0_skipped", []).append({"place": str(v0), "reason": str(e)})
                continue
            table = v0_order_table(aux.G, red.Q, v0, cfg.param("max_index", 3))
            ok = all(val >= need for _, val, need in table)
            res.data.setdefault("v0_checks", []).append({
                "place": str(v0), "Q": [str(x) for x in red.Q],
                "rows": [[list(i), _num(float(v)) if v == math.inf else v, need] for i, v, need in table],
            })
            res.verdict("Lower bound lwrb at v0", _status(ok),
                        f"ord_v0 Delta_i(G)(Q) >= T - |i| at {v0}")
    return res


def _default_places(cfg):
    if cfg.places:
        return cfg.places
    out = []
    for k in (1, 2):
        out.extend(Place(f) for f in irreducibles(cfg.ctx, k))
    return out


def cmd_reduce(cfg, seed):
    P = _require(cfg, "P")
    res = Result(["place", "s1", "s2", "bound", "Q", "valuations"])
    d = cfg.F.in_dim
    all_ok = True
    from .dynamics import NotIntegralError, ShiftTooCostly

    max_steps = cfg.param("max_steps", 40)
    skipped = []
    for v0 in _default_places(cfg):
        bound = v0.residue_field_size(cfg.ctx.q) ** d + 1
        try:
            red = reduce_and_shift(cfg.F, P, v0, max_steps)
        except NotIntegralError:
            continue
        except ShiftTooCostly as e:
            all_ok &= e.s1 < e.s2 <= bound
            skipped.append(str(v0))
            res.rows.append([str(v0), e.s1, e.s2, bound, "", "not computed"])
            continue
        ok = red.s2 <= bound and all(v >= 1 for v in red.q_valuations)
        all_ok &= ok
        vals = ["inf" if v == math.inf else v for v in red.q_valuations]
        res.rows.append([str(v0), red.s1, red.s2, bound, " ; ".join(str(x) for x in red.Q),
                         " ".join(map(str, vals))])
    res.data = {"places": len(res.rows), "exact_shift_skipped": skipped}
    res.verdict("Reduction redux (pigeonhole)", _status(all_ok),
                "s2 <= |k(v0)|^d + 1 and Q in the maximal ideal")
    return res


def cmd_stability(cfg, seed):
    pi = _require(cfg, "pi")
    st = stability_check(pi, cfg.F)
    res = Result(["stable", "F_prime", "witness"])
    res.rows = [[st.stable, "" if st.f_prime is None else str(st.f_prime),
                 "" if st.witness is None else " ".join(map(str, st.witness))]]
    res.data = {"stable": st.stable, "F_prime": None if st.f_prime is None else str(st.f_prime)}
    want = cfg.expect.get("stable")
    anchor = "Definition of a sub t-module"
    if want is None:
        res.verdict(anchor, "data", f"stable: {st.stable}")
    else:
        res.verdict(anchor, _status(bool(want) == st.stable), f"stable: {st.stable}, expected {want}")
    return res


def cmd_gamma(cfg, seed):
    P = _require(cfg, "P")
    S = cfg.param("S", 3)
    pts = gamma_set(cfg.F, P, S)
    res = Result(["index"] + [f"x{i + 1}" for i in range(cfg.F.in_dim)] + ["height"])
    for k, pt in enumerate(pts):
        res.rows.append([k] + [str(x) for x in pt] + [height_tuple(pt)])
    full = cfg.F.p ** (S + 1)
    res.data = {"size": len(pts), "all_b": full}
    res.verdict("Gamma(S, P)", "data", f"{len(pts)} distinct points from {full} polynomials b")
    return res


def cmd_preperiodic(cfg, seed):
    P = _require(cfg, "P")
    pr = preperiodicity_probe(cfg.F, P, cfg.param("N_max", 20), cfg.param("height_cap", 1000))
    res = Result(["n", "height"])
    res.rows = [[n, h] for n, h in enumerate(pr.heights)]
    res.data = pr.summary()
    res.verdict("Preperiodic points", "data", pr.status)
    return res


def cmd_product_formula(cfg, seed):
    rng = random.Random(seed)
    ctx = cfg.ctx
    count = cfg.param("count", 100)
    deg = cfg.param("max_degree", 6)
    res = Result(["element", "sum"])
    all_ok = True
    for _ in range(count):
        while True:
            num = FqPoly(ctx, {e: rng.randrange(ctx.q) for e in range(rng.randint(0, deg) + 1)})
            den = FqPoly(ctx, {e: rng.randrange(ctx.q) for e in range(rng.randint(0, deg) + 1)})
            if not num.is_zero() and not den.is_zero():
                break
        a = RatFunc(num, den)
        total = sum(o * f for _, o, f in product_formula_terms(a))
        all_ok &= total == 0
        res.rows.append([str(a), total])
    res.data = {"count": count}
    res.verdict("Product formula", _status(all_ok), f"{count} random elements")
    return res


COMMANDS = {
    "delta": cmd_delta,
    "delta-lambda": cmd_delta_lambda,
    "alpha": cmd_alpha,
    "orbit": cmd_orbit,
    "height": cmd_height,
    "truncbound": cmd_truncbound,
    "kappa": cmd_kappa,
    "siegel-demo": cmd_siegel_demo,
    "aux-build": cmd_aux_build,
    "reduce": cmd_reduce,
    "stability": cmd_stability,
    "gamma": cmd_gamma,
    "preperiodic": cmd_preperiodic,
    "product-formula": cmd_product_formula,
}


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _json_default(x):
    return str(x)


def run(command: str, cfg: ExperimentConfig, out_dir: str, seed: int | None = None):
    """Run one subcommand; write its artifacts and return the verdict list."""
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")
    seed = cfg.seed if seed is None else seed
    cfg.command = command
    res = COMMANDS[command](cfg, seed)
    os.makedirs(out_dir, exist_ok=True)
    csv_name, json_name = f"{command}.csv", f"{command}.json"
    _write_csv(os.path.join(out_dir, csv_name), res.header, res.rows)
    with open(os.path.join(out_dir, json_name), "w", encoding="utf-8") as fh:
        json.dump(res.data, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    verdicts = [
        VerdictRecord(f"{command}-{k}", anchor, status, detail, [csv_name, json_name])
        for k, (anchor, status, detail) in enumerate(res.verdicts)
    ]
    path = os.path.join(out_dir, "verdicts.json")
    existing = []
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            try:
                existing = json.load(fh)
            except json.JSONDecodeError:
                existing = []
    existing = [v for v in existing if not v.get("experiment", "").startswith(f"{command}-")]
    existing.extend(asdict(v) for v in verdicts)
    existing.sort(key=lambda v: v["experiment"])
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(existing, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return verdicts


def main(argv=None):
    ap = argparse.ArgumentParser(prog="tmlab", description="Additive polynomial dynamics over F_q(T).")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON experiment file")
    ap.add_argument("--out", default="out", help="directory for CSV/JSON artifacts")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized commands")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        verdicts = run(args.command, cfg, args.out, args.seed)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, InfeasibleError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    failed = False
    for v in verdicts:
        print(f"[{v.status.upper():4}] {v.anchor}: {v.detail}")
        failed |= v.status == "fail"
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
