"""Experiment configuration files (JSON).

Schema (every key except ``module`` is optional)::

    {
      "field":  {"p": 3, "m": 1, "modulus": [1, 0, 1]},
      "module": {"preset": "carlitz", "p": 3}
              | {"preset": "carlitz-tensor", "p": 2, "d": 2}
              | {"preset": "diagonal", "q": [2, 4]}
              | {"preset": "random", "p": 2, "d": 2, "r": 1, "seed": 5}
              | {"d": 2, "A": [[["T", "1"], ["0", "T"]], [["0", "0"], ["1", "0"]]]}
              | {"d": 2, "A": [["T", "1", "0", "T"], ["0", "0", "1", "0"]]}
              | {"d": 1, "maps": ["T*x1 + x1^3"]},
      "point":  ["1"],
      "lambda": ["1", "0"] | {"A": [[["1", "0"]]]} | {"map": "x1 + x2^2"},
      "pi":     {"A": ...} | {"maps": [...]},
      "places": ["T", "T^2+T+2"],
      "paramset": {"d1": "3/2", ..., "rate": "1"},
      "params": {"N_max": 10, ..., "kappa": {"N": [1, 2]}},
      "expect": {"exact_rate": "1"},
      "seed": 0
    }

Keys inside ``params`` apply to every subcommand; a nested object named
after a subcommand overrides them for that subcommand only.

Matrices A_i list the coefficient of tau^i; each is a nested d x d list or
a flat row-major list. ``maps`` gives each output coordinate as a
polynomial in x1..xd and must be additive: only monomials x_i^(p^k).
Field literals use the syntax of ``parsing``; a malformed literal is
reported with its line and column in the config file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .fields import GF, FqCtx
from .heights import Place
from .ore import TwistedOperator
from .parsing import ParseError, parse_mpoly, parse_poly, parse_ratfunc
from .presets import carlitz, carlitz_tensor, diagonal, random_module
from .ratfunc import RatFunc
from .siegel import ParamSet


class ConfigError(ValueError):
    def __init__(self, msg, line=None, column=None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + where)


@dataclass
class ExperimentConfig:
    ctx: FqCtx
    F: TwistedOperator
    P: tuple | None = None
    lam: TwistedOperator | None = None
    pi: TwistedOperator | None = None
    places: list = field(default_factory=list)
    paramset: ParamSet | None = None
    params: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    seed: int = 0
    preset: str | None = None
    preset_args: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)
    command: str | None = None

    def param(self, name, default):
        """Look up ``params[command][name]``, then ``params[name]``."""
        scoped = self.params.get(self.command) if self.command else None
        if isinstance(scoped, dict) and name in scoped:
            return scoped[name]
        return self.params.get(name, default)


class _Locator:
    """Map a JSON string value back to its position in the source text."""

    def __init__(self, text):
        self.text = text
        self.cursor = {}

    def where(self, s, pos=0):
        needle = json.dumps(s)
        start = self.cursor.get(s, 0)
        k = self.text.find(needle, start)
        if k < 0:
            k = self.text.find(needle)
        if k < 0:
            return None, None
        self.cursor[s] = k + 1
        k += 1 + pos
        line = self.text.count("\n", 0, k) + 1
        col = k - (self.text.rfind("\n", 0, k) + 1) + 1
        return line, col


def _literal(ctx, s, loc, kind="ratfunc", nvars=None):
    if not isinstance(s, (str, int)):
        raise ConfigError(f"expected a string literal, got {s!r}")
    s = str(s)
    try:
        if kind == "poly":
            return parse_poly(ctx, s)
        if kind == "mpoly":
            return parse_mpoly(ctx, s, nvars)
        return parse_ratfunc(ctx, s)
    except ParseError as e:
        line, col = loc.where(s, e.pos)
        msg = str(e).split(" at line")[0]
        raise ConfigError(f"bad literal {s!r}: {msg}", line, col) from None


def _matrix(ctx, m, rows, cols, loc):
    if len(m) == rows * cols and all(not isinstance(x, list) for x in m):
        m = [m[i * cols:(i + 1) * cols] for i in range(rows)]
    if len(m) != rows or any(not isinstance(r, list) or len(r) != cols for r in m):
        raise ConfigError(f"matrix must be {rows} x {cols} (nested or flat)")
    return [[_literal(ctx, x, loc) for x in r] for r in m]


def _from_maps(ctx, maps, d, loc):
    """Coordinate polynomials -> twisted operator; rejects anything non-additive."""
    p = ctx.p
    polys = [_literal(ctx, s, loc, "mpoly", d) for s in maps]
    zero = RatFunc.zero(ctx)
    by_k = {}
    for row, (s, G) in enumerate(zip(maps, polys)):
        for e, c in G.terms.items():
            nz = [(i, k) for i, k in enumerate(e) if k]
            if len(nz) != 1:
                line, col = loc.where(s)
                raise ConfigError(f"map {s!r} is not additive (monomial {e})", line, col)
            i, k = nz[0]
            j = 0
            while p ** j < k:
                j += 1
            if p ** j != k:
                line, col = loc.where(s)
                raise ConfigError(f"map {s!r} is not additive (x{i + 1}^{k})", line, col)
            by_k.setdefault(j, {})[(row, i)] = c
    if not by_k:
        return TwistedOperator.zero(ctx, len(maps), d)
    mats = []
    for j in range(max(by_k) + 1):
        entries = by_k.get(j, {})
        mats.append([[entries.get((r, i), zero) for i in range(d)] for r in range(len(maps))])
    return TwistedOperator(ctx, mats, d, len(maps))


def _operator(ctx, desc, d, out_dim, loc, what):
    if isinstance(desc, dict) and "A" in desc:
        mats = desc["A"]
        if not isinstance(mats, list) or not mats:
            raise ConfigError(f"{what}: 'A' must be a nonempty list of matrices")
        return TwistedOperator(ctx, [_matrix(ctx, m, out_dim, d, loc) for m in mats], d, out_dim)
    if isinstance(desc, dict) and ("maps" in desc or "map" in desc):
        maps = desc.get("maps", [desc.get("map")])
        if not isinstance(maps, list):
            raise ConfigError(f"{what}: 'maps' must be a list")
        return _from_maps(ctx, maps, d, loc)
    raise ConfigError(f"{what}: expected 'A' or 'maps'")


def _field(raw):
    f = raw.get("field")
    if f is None:
        return None
    try:
        p = int(f["p"])
    except (KeyError, TypeError, ValueError):
        raise ConfigError("field needs an integer 'p'") from None
    m = int(f.get("m", 1))
    modulus = f.get("modulus")
    try:
        return GF(p, m, tuple(modulus) if modulus else None)
    except ValueError as e:
        raise ConfigError(f"bad field: {e}") from None


def _fractions(params):
    for k, v in params.items():
        if isinstance(v, dict):
            _fractions(v)
        elif isinstance(v, str) and "/" in v:
            try:
                params[k] = Fraction(v)
            except ValueError:
                pass


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text)


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON: {e.msg}", e.lineno, e.colno) from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    loc = _Locator(text)
    mod = raw.get("module")
    if not isinstance(mod, dict):
        raise ConfigError("missing 'module'")
    ctx = _field(raw)
    P = lam = None
    preset = mod.get("preset")
    args = {}
    if preset is not None:
        try:
            if preset == "carlitz":
                args = {"p": int(mod["p"])}
                F = carlitz(args["p"])
            elif preset == "carlitz-tensor":
                args = {"p": int(mod["p"]), "d": int(mod["d"])}
                F = carlitz_tensor(args["p"], args["d"])
            elif preset == "diagonal":
                args = {"q": [int(x) for x in mod["q"]]}
                F = diagonal(*args["q"])
            elif preset == "random":
                args = {k: int(mod[k]) for k in ("p", "d", "r", "seed")}
                F, P, lam = random_module(args["p"], args["d"], args["r"], args["seed"])
            else:
                raise ConfigError(f"unknown preset {preset!r}")
        except KeyError as e:
            raise ConfigError(f"preset {preset!r} needs parameter {e.args[0]!r}") from None
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"preset {preset!r}: {e}") from None
        if ctx is not None and ctx != F.ctx:
            raise ConfigError("field does not match the preset")
        ctx = F.ctx
    else:
        if ctx is None:
            raise ConfigError("explicit modules need a 'field'")
        try:
            d = int(mod["d"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError("module needs an integer 'd'") from None
        F = _operator(ctx, mod, d, d, loc, "module")
    d = F.in_dim
    if "point" in raw:
        pts = raw["point"]
        if not isinstance(pts, list) or len(pts) != d:
            raise ConfigError(f"point must be a list of {d} literals")
        P = tuple(_literal(ctx, x, loc) for x in pts)
    if "lambda" in raw:
        desc = raw["lambda"]
        if isinstance(desc, list):
            if len(desc) != d:
                raise ConfigError(f"lambda row must have {d} entries")
            lam = TwistedOperator(ctx, [[[_literal(ctx, x, loc) for x in desc]]], d, 1)
        else:
            lam = _operator(ctx, desc, d, 1, loc, "lambda")
    pi = None
    if "pi" in raw:
        desc = raw["pi"]
        e = int(desc.get("e", 1)) if isinstance(desc, dict) else 1
        if isinstance(desc, dict) and "maps" in desc:
            e = len(desc["maps"])
        pi = _operator(ctx, desc, d, e, loc, "pi")
    places = []
    for s in raw.get("places", []):
        f = _literal(ctx, s, loc, "poly")
        try:
            places.append(Place(f))
        except ValueError as e:
            line, col = loc.where(s)
            raise ConfigError(f"place {s!r}: {e}", line, col) from None
    paramset = None
    if "paramset" in raw:
        ps = dict(raw["paramset"])
        ps.setdefault("p", ctx.p)
        ps.setdefault("d", d)
        try:
            paramset = ParamSet.from_json(ps)
        except (KeyError, ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"paramset: {e}") from None
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be an object")
    _fractions(params)
    return ExperimentConfig(
        ctx=ctx, F=F, P=P, lam=lam, pi=pi, places=places, paramset=paramset,
        params=params, expect=raw.get("expect", {}), seed=int(raw.get("seed", 0)),
        preset=preset, preset_args=args, raw=raw,
    )
