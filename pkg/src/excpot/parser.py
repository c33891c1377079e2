"""Expression language for potentials and integrals.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*`` and ``/``; ``^`` is right-associative)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" exponent)?
    exponent:= ("-" | "+") exponent | atom ("^" exponent)?
    atom    := INTEGER | "i" | IDENT | "(" expr ")"

Exponents must fold to non-negative integer constants; the right operand of
``/`` must fold to a nonzero constant.  Implicit multiplication is an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .exactnum import GaussianRational, I
from .poly import NATURAL, Poly, VarSet

__all__ = [
    "Token",
    "ParseError",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "tokenize",
    "parse_ast",
    "parse",
    "parse_constant",
    "render",
]


class ParseError(ValueError):
    """Rejected input; ``offset`` is a byte offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.message = message
        self.offset = offset


@dataclass(frozen=True)
class Token:
    kind: str  # ident, integer, imag, plus, minus, star, slash, caret, lparen, rparen
    text: str
    start: int
    end: int


_PUNCT = {"+": "plus", "-": "minus", "*": "star", "/": "slash", "^": "caret", "(": "lparen", ")": "rparen"}
_LEXEME = re.compile(r"\s*(?:(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def tokenize(text: str) -> list[Token]:
    data = text.encode("utf-8")
    src = data.decode("latin-1")  # one char per byte so offsets are byte offsets
    toks: list[Token] = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _LEXEME.match(src, pos)
        if m is None or m.end() == pos:
            rest = src[pos:].lstrip()
            if not rest:
                break
            off = n - len(rest)
            raise ParseError(f"unexpected character {text.encode()[off:off + 1].decode(errors='replace')!r}", off)
        if m.group("int") is not None:
            toks.append(Token("integer", m.group("int"), m.start("int"), m.end("int")))
        elif m.group("id") is not None:
            word = m.group("id")
            kind = "imag" if word == "i" else "ident"
            toks.append(Token(kind, word, m.start("id"), m.end("id")))
        else:
            op = m.group("op")
            toks.append(Token(_PUNCT[op], op, m.start("op"), m.end("op")))
        pos = m.end()
    return toks


# -- AST ------------------------------------------------------------------
@dataclass(frozen=True)
class Const:
    value: GaussianRational
    offset: int


@dataclass(frozen=True)
class Var:
    name: str
    offset: int


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    offset: int


@dataclass(frozen=True)
class BinOp:
    op: str  # add, sub, mul, div
    left: "Expr"
    right: "Expr"
    offset: int


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"
    offset: int


Expr = Union[Const, Var, Neg, BinOp, Pow]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.end = len(text.encode("utf-8"))

    def peek(self) -> Token | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, kind: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.end)
        if kind is not None and tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text!r}", tok.start)
        self.i += 1
        return tok

    def parse(self) -> Expr:
        if not self.toks:
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            if tok.kind in ("ident", "imag", "integer", "lparen"):
                raise ParseError("implicit multiplication is not allowed; write '*'", tok.start)
            raise ParseError(f"unexpected token {tok.text!r}", tok.start)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (tok := self.peek()) is not None and tok.kind in ("plus", "minus"):
            self.i += 1
            node = BinOp("add" if tok.kind == "plus" else "sub", node, self.term(), tok.start)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (tok := self.peek()) is not None and tok.kind in ("star", "slash"):
            self.i += 1
            node = BinOp("mul" if tok.kind == "star" else "div", node, self.unary(), tok.start)
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind in ("minus", "plus"):
            self.i += 1
            operand = self.unary()
            return Neg(operand, tok.start) if tok.kind == "minus" else operand
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok.kind == "caret":
            self.i += 1
            return Pow(base, self.exponent(), tok.start)
        return base

    def exponent(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind in ("minus", "plus"):
            self.i += 1
            operand = self.exponent()
            return Neg(operand, tok.start) if tok.kind == "minus" else operand
        return self.power()

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "integer":
            return Const(GaussianRational(int(tok.text)), tok.start)
        if tok.kind == "imag":
            return Const(I, tok.start)
        if tok.kind == "ident":
            return Var(tok.text, tok.start)
        if tok.kind == "lparen":
            node = self.expr()
            self.take("rparen")
            return node
        raise ParseError(f"unexpected token {tok.text!r}", tok.start)


def parse_ast(text: str) -> Expr:
    return _Parser(text).parse()


def _lower(node: Expr, vars: VarSet) -> Poly:
    if isinstance(node, Const):
        return Poly.const(node.value, vars)
    if isinstance(node, Var):
        if node.name not in vars.names:
            raise ParseError(f"unknown identifier {node.name!r} (variables are {vars})", node.offset)
        return Poly.var(node.name, vars)
    if isinstance(node, Neg):
        return -_lower(node.operand, vars)
    if isinstance(node, BinOp):
        left = _lower(node.left, vars)
        right = _lower(node.right, vars)
        if node.op == "add":
            return left + right
        if node.op == "sub":
            return left - right
        if node.op == "mul":
            return left * right
        c = _constant_of(right)
        if c is None:
            raise ParseError("division by a non-constant", node.offset)
        if not c:
            raise ParseError("division by zero", node.offset)
        return left.scale(c.inverse())
    if isinstance(node, Pow):
        base = _lower(node.base, vars)
        e = _constant_of(_lower(node.exponent, vars))
        if e is None or not e.is_real() or e.re.denominator != 1:
            raise ParseError("exponent must be an integer constant", node.offset)
        n = int(e.re)
        if n < 0:
            raise ParseError("negative exponent", node.offset)
        return base**n
    raise TypeError(f"unknown node {node!r}")


def _constant_of(p: Poly) -> GaussianRational | None:
    if p.is_zero():
        return GaussianRational(0)
    if len(p) == 1 and (0, 0, 0, 0) in p.terms:
        return p.terms[(0, 0, 0, 0)]
    return None


def parse(text: str, vars: VarSet = NATURAL) -> Poly:
    """Parse ``text`` into an exact polynomial over ``vars``."""
    return _lower(parse_ast(text), vars)


def parse_constant(text: str) -> GaussianRational:
    """Parse a variable-free expression into an element of Q(i)."""
    p = _lower(parse_ast(text), VarSet(("__a", "__b", "__c", "__d")))
    c = _constant_of(p)
    if c is None:  # pragma: no cover - unreachable: no identifiers accepted
        raise ParseError("expected a constant", 0)
    return c


# -- rendering --------------------------------------------------------------
def _render_monomial(e, vars: VarSet) -> str:
    parts = []
    for name, n in zip(vars.names, e):
        if n == 1:
            parts.append(name)
        elif n > 1:
            parts.append(f"{name}^{n}")
    return "*".join(parts)


def _render_rational(q: Fraction) -> str:
    return str(q)


def render(f: Poly) -> str:
    """Canonical text in descending graded-lex order; ``parse(render(f)) == f``."""
    items = f.items()
    if not items:
        return "0"
    out = []
    for idx, (e, c) in enumerate(items):
        mono = _render_monomial(e, f.vars)
        if c.is_real():
            q = c.re
            neg = q < 0
            mag = -q if neg else q
            if mono:
                body = mono if mag == 1 else f"{_render_rational(mag)}*{mono}"
            else:
                body = _render_rational(mag)
        else:
            neg = False
            body = f"({c})*{mono}" if mono else f"({c})"
        if idx == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)
