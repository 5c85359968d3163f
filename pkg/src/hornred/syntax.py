"""Text syntax for rationals, linear parameters, polynomials and rational functions.

Grammar (whitespace ignored)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary | unary)*     # juxtaposition multiplies
    unary   := ("+" | "-") unary | power
    power   := atom ("^" ["-"] INT)?
    atom    := INT | NAME | "(" expr ")"
    NAME    := "z" | "eps" | "ε" | "m"

Juxtaposition binds like ``*``, so ``2eps`` and ``3z^2`` are accepted. ``m`` is
only meaningful for term-ratio expressions and switches to the (m, eps)
variable set.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import ME, ZE, Poly, RatFun

_TOKEN = re.compile(r"\s*(?:(\d+)|(eps|ε|z|m)|(\*\*|[-+*/^()]))")


class SyntaxErrorAt(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


def _tokenize(text: str):
    pos = 0
    out = []
    text_stripped = text.rstrip()
    while pos < len(text_stripped):
        mt = _TOKEN.match(text_stripped, pos)
        if not mt:
            raise SyntaxErrorAt(text, pos, "unexpected character")
        num, name, op = mt.groups()
        if num is not None:
            out.append(("int", int(num), mt.start(1)))
        elif name is not None:
            out.append(("name", "eps" if name == "ε" else name, mt.start(2)))
        else:
            out.append(("op", "^" if op == "**" else op, mt.start(3)))
        pos = mt.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ctx):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise SyntaxErrorAt(self.text, tok[2], f"expected {op!r}")

    def parse(self) -> RatFun:
        if self.peek()[0] == "end":
            raise SyntaxErrorAt(self.text, 0, "empty expression")
        val = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise SyntaxErrorAt(self.text, tok[2], "trailing input")
        return val

    def expr(self):
        val = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while True:
            kind, v, pos = self.peek()
            if kind == "op" and v in "*/":
                self.take()
                rhs = self.unary()
                if v == "*":
                    val = val * rhs
                else:
                    if rhs.is_zero():
                        raise SyntaxErrorAt(self.text, pos, "division by zero")
                    val = val / rhs
            elif kind in ("int", "name") or (kind == "op" and v == "("):
                val = val * self.power()
            else:
                return val

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v in "+-":
            self.take()
            inner = self.unary()
            return -inner if v == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        kind, v, pos = self.peek()
        if kind == "op" and v == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                raise SyntaxErrorAt(self.text, tok[2], "exponent must be an integer")
            n = sign * tok[1]
            if n < 0 and base.is_zero():
                raise SyntaxErrorAt(self.text, pos, "division by zero")
            return base**n
        return base

    def atom(self):
        kind, v, pos = self.take()
        if kind == "int":
            return RatFun.const(v, self.ctx)
        if kind == "name":
            if v not in self.ctx.names():
                raise SyntaxErrorAt(self.text, pos, f"variable {v!r} not allowed here")
            return RatFun.var(v, self.ctx)
        if kind == "op" and v == "(":
            val = self.expr()
            self.expect(")")
            return val
        raise SyntaxErrorAt(self.text, pos, "expected a number, variable or '('")


def parse_ratfun(text: str, ctx=ZE) -> RatFun:
    return _Parser(str(text), ctx).parse()


def parse_poly(text: str, ctx=ZE) -> Poly:
    r = parse_ratfun(text, ctx)
    if not r.is_polynomial():
        raise ValueError(f"{text!r} is not a polynomial")
    return r.as_poly()


def parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    r = parse_ratfun(text)
    if not r.is_constant():
        raise ValueError(f"{text!r} is not a rational number")
    return r.constant_value()


def parse_term_ratio(text: str) -> RatFun:
    return parse_ratfun(text, ME)
