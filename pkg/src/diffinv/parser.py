"""Expression text to DiffRational.

Grammar::

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' int)?
    base   := int | ident | 'D' '[' int (',' int)* ']' '(' ident ')' | '(' expr ')'

Printed output of DiffRational parses back to an equal value.
"""

from __future__ import annotations

import re
from typing import List, NamedTuple

from .diffcore import Context, DiffRational, ZeroDenominator, param_sym, s_sym, u_sym, x_sym, z_sym

__all__ = ["ParseError", "ExprSyntaxError", "ArityError", "UnknownIdentifier", "parse"]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__("%s at position %d" % (message, position))
        self.position = position


class ExprSyntaxError(ParseError):
    pass


class ArityError(ParseError):
    pass


class UnknownIdentifier(ParseError):
    pass


class _Tok(NamedTuple):
    kind: str
    text: str
    pos: int


_TOKEN_RE = re.compile(r"\s*(?:(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()\[\],]))")

_X_RE = re.compile(r"x([1-9]\d*)$")
_S_RE = re.compile(r"s([1-9]\d*)$")
_Z_RE = re.compile(r"z([1-9]\d*)_([1-9]\d*)$")
_U_RE = re.compile(r"u([1-9]\d*)_([1-9]\d*)$")


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        mt = _TOKEN_RE.match(text, pos)
        if mt is None:
            raise ExprSyntaxError("unexpected character %r" % text[pos], pos)
        kind = mt.lastgroup
        toks.append(_Tok(kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, ctx: Context):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.text != text or t.kind == "end":
            what = "end of input" if t.kind == "end" else repr(t.text)
            raise ExprSyntaxError("expected %r, found %s" % (text, what), t.pos)
        return self.take()

    def expr(self) -> DiffRational:
        neg = False
        if self.peek().text == "-" and self.peek().kind == "op":
            self.take()
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> DiffRational:
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().text in "*/":
            t = self.take()
            rhs = self.factor()
            if t.text == "*":
                acc = acc * rhs
            else:
                if rhs.is_zero():
                    raise ExprSyntaxError("division by zero", t.pos)
                acc = acc / rhs
        return acc

    def factor(self) -> DiffRational:
        base = self.base()
        if self.peek().text == "^" and self.peek().kind == "op":
            self.take()
            t = self.take()
            if t.kind != "int":
                raise ExprSyntaxError("exponent must be a nonnegative integer", t.pos)
            base = base ** int(t.text)
        return base

    def base(self) -> DiffRational:
        t = self.peek()
        if t.kind == "int":
            self.take()
            return DiffRational.const(int(t.text))
        if t.kind == "ident":
            self.take()
            if t.text == "D":
                return self.derivative(t)
            return self.identifier(t, self.ctx.zero_alpha())
        if t.text == "(" and t.kind == "op":
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        what = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError("unexpected %s" % what, t.pos)

    def derivative(self, head: _Tok) -> DiffRational:
        self.expect("[")
        alpha = []
        while True:
            t = self.take()
            if t.kind != "int":
                raise ExprSyntaxError("expected an integer in the index list", t.pos)
            alpha.append(int(t.text))
            if self.peek().text == ",":
                self.take()
                continue
            break
        self.expect("]")
        if len(alpha) != self.ctx.m:
            raise ArityError("index list has length %d, expected m=%d" % (len(alpha), self.ctx.m), head.pos)
        self.expect("(")
        t = self.take()
        if t.kind != "ident":
            raise ExprSyntaxError("expected a variable name", t.pos)
        value = self.identifier(t, tuple(alpha), differentiable_only=True)
        self.expect(")")
        return value

    def identifier(self, t: _Tok, alpha: tuple, differentiable_only: bool = False) -> DiffRational:
        name = t.text
        mt = _X_RE.match(name)
        if mt:
            j = int(mt.group(1))
            if j > self.ctx.n:
                raise UnknownIdentifier("%s exceeds n=%d" % (name, self.ctx.n), t.pos)
            return DiffRational.symbol(x_sym(j, alpha))
        mt = _S_RE.match(name)
        if mt:
            return DiffRational.symbol(s_sym(int(mt.group(1)), alpha))
        if differentiable_only:
            raise UnknownIdentifier("%s cannot be differentiated here" % name, t.pos)
        mt = _Z_RE.match(name)
        if mt:
            i, j = int(mt.group(1)), int(mt.group(2))
            if i > self.ctx.n + 1 or j > self.ctx.n:
                raise UnknownIdentifier("%s out of range" % name, t.pos)
            return DiffRational.symbol(z_sym(i, j))
        mt = _U_RE.match(name)
        if mt:
            return DiffRational.symbol(u_sym(int(mt.group(1)), int(mt.group(2))))
        if name in self.ctx.parameters:
            return DiffRational.symbol(param_sym(name))
        raise UnknownIdentifier("unknown identifier %r" % name, t.pos)


def parse(text: str, ctx: Context) -> DiffRational:
    p = _Parser(text, ctx)
    try:
        value = p.expr()
    except ZeroDenominator as exc:
        raise ExprSyntaxError(str(exc), p.peek().pos) from None
    t = p.peek()
    if t.kind != "end":
        raise ExprSyntaxError("unexpected %r" % t.text, t.pos)
    return value.cancel()
