"""Parse field literals such as ``"T^3+2*T+1"`` or ``"(1,1)*T/(T^2+1)"``.

Grammar::

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ['^' INT]
    atom   := INT | 'T' | '(' expr ')' | '(' INT (',' INT)+ ')'

(``parse_mpoly`` also accepts the variables x1, x2, ... as atoms.)

Integers are read in F_p. A parenthesised comma list ``(c0,c1,...)`` is
the F_q element c0 + c1 x + ... in the defining basis of F_q/F_p.
"""

from __future__ import annotations

import re

from .fields import FqCtx
from .polys import FqPoly
from .ratfunc import RatFunc


class ParseError(ValueError):
    def __init__(self, msg, text, pos, line=1):
        self.text = text
        self.pos = pos
        self.line = line
        super().__init__(f"{msg} at line {line}, column {pos + 1}: {text!r}")


_TOKEN = re.compile(r"\s*(?:(\d+)|(T)|([-+*/^(),])|x(\d+))")


def _tokenize(text):
    pos = 0
    out = []
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError("unexpected character", text, bad)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            out.append(("T", None, start))
        elif m.group(4) is not None:
            out.append(("var", int(m.group(4)), start - 1))
        else:
            out.append((m.group(3), None, start))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    def __init__(self, ctx: FqCtx, text: str, line: int):
        self.ctx = ctx
        self.text = text
        self.line = line
        self.toks = _tokenize(text) if text.strip() else None
        self.i = 0

    def error(self, msg):
        tok = self.toks[self.i]
        raise ParseError(msg, self.text, tok[2], self.line)

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            self.error(f"expected {kind!r}")
        self.i += 1
        return tok

    def parse(self) -> RatFunc:
        if self.toks is None:
            raise ParseError("empty literal", self.text, 0, self.line)
        val = self.expr()
        if self.peek() != "end":
            self.error("trailing input")
        return val

    def expr(self):
        neg = False
        if self.peek() == "-":
            self.take()
            neg = True
        val = self.term()
        if neg:
            val = -val
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self.factor()
            if op == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    self.i -= 1
                    self.error("division by zero")
                val = val / rhs
        return val

    def factor(self):
        base = self.atom()
        if self.peek() == "^":
            self.take()
            neg = False
            if self.peek() == "-":
                self.take()
                neg = True
            e = self.take("int")[1]
            if neg:
                if base.is_zero():
                    self.error("zero to a negative power")
                e = -e
            base = base ** e
        return base

    def atom(self):
        kind = self.peek()
        ctx = self.ctx
        if kind == "int":
            return RatFunc.from_int(ctx, self.take()[1])
        if kind == "T":
            self.take()
            return RatFunc.T(ctx)
        if kind == "(":
            # tuple literal?
            j = self.i + 1
            if (
                self.toks[j][0] == "int"
                and self.toks[j + 1][0] == ","
            ):
                self.take("(")
                digits = [self.take("int")[1]]
                while self.peek() == ",":
                    self.take()
                    digits.append(self.take("int")[1])
                self.take(")")
                if len(digits) > ctx.m:
                    self.i -= 1
                    self.error(f"coordinate vector longer than m={ctx.m}")
                return RatFunc.const(ctx, ctx.from_digits(digits))
            self.take("(")
            val = self.expr()
            self.take(")")
            return val
        self.error("expected a number, T, or '('")


class _MPolyParser(_Parser):
    """The same grammar with variables x1..xd; values are MPoly."""

    def __init__(self, ctx, text, line, nvars):
        super().__init__(ctx, text, line)
        self.nvars = nvars

    def _wrap(self, val):
        from .mpoly import MPoly

        if isinstance(val, RatFunc):
            return MPoly.constant(self.ctx, self.nvars, val)
        return val

    def parse(self):
        return self._wrap(super().parse())

    def expr(self):
        neg = False
        if self.peek() == "-":
            self.take()
            neg = True
        val = self._wrap(self.term())
        if neg:
            val = -val
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self._wrap(self.term())
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self._wrap(self.factor())
        while self.peek() in ("*", "/"):
            op = self.take()[0]
            rhs = self._wrap(self.factor())
            if op == "*":
                val = val * rhs
            else:
                const = rhs.coefficient((0,) * self.nvars)
                if rhs.total_degree() > 0 or const.is_zero():
                    self.i -= 1
                    self.error("can only divide by a nonzero constant")
                val = val.scale(const.inverse())
        return val

    def factor(self):
        base = self._wrap(self.atom())
        if self.peek() == "^":
            self.take()
            e = self.take("int")[1]
            base = base.power(e)
        return base

    def atom(self):
        from .mpoly import MPoly

        if self.peek() == "var":
            k = self.take()[1]
            if not 1 <= k <= self.nvars:
                self.i -= 1
                self.error(f"variable x{k} out of range 1..{self.nvars}")
            return MPoly.variable(self.ctx, self.nvars, k - 1)
        if self.peek() == "(":
            j = self.i + 1
            if not (self.toks[j][0] == "int" and self.toks[j + 1][0] == ","):
                self.take("(")
                val = self.expr()
                self.take(")")
                return val
        return super().atom()


def parse_ratfunc(ctx: FqCtx, text: str, line: int = 1) -> RatFunc:
    """Parse a literal for an element of F_q(T)."""
    return _Parser(ctx, str(text), line).parse()


def parse_mpoly(ctx: FqCtx, text: str, nvars: int, line: int = 1):
    """Parse a polynomial in x1..x_nvars with coefficients in F_q(T)."""
    return _MPolyParser(ctx, str(text), line, nvars).parse()


def parse_poly(ctx: FqCtx, text: str, line: int = 1) -> FqPoly:
    """Parse a literal that must be a polynomial in T."""
    val = parse_ratfunc(ctx, text, line)
    if not val.is_poly():
        raise ParseError("expected a polynomial", str(text), 0, line)
    return val.num
