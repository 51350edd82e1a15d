"""Recursive-descent parser for polynomial and scalar expressions.

Grammar (whitespace-insensitive)::

    expr    := ['-'|'+'] term (('+'|'-') term)*
    term    := factor ('*' factor)*
    factor  := rational | 'z' ['^' int] | var ['^' nonneg-int] | '(' expr ')'
    rational:= int ['/' posint]
    var     := 'x' index           (1 <= index <= n)

There is no implicit multiplication and no exponent on parenthesized
groups.  'z' denotes the configured root of unity and needs m > 1.
Error positions are 1-based character offsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .field import CyclotomicScalar, FieldConfig
from .poly import Polynomial


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int  # 1-based offset of the first character


_SINGLE = {
    "+": "plus",
    "-": "minus",
    "*": "star",
    "^": "caret",
    "/": "slash",
    "(": "lparen",
    ")": "rparen",
}


def tokenize(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        pos = i + 1
        if ch in _SINGLE:
            tokens.append(Token(_SINGLE[ch], ch, pos))
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], pos))
            i = j
        elif ch == "z":
            tokens.append(Token("zeta", ch, pos))
            i += 1
        elif ch == "x":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("variable needs a numeric index", pos)
            tokens.append(Token("var", text[i:j], pos))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


@dataclass(frozen=True)
class ParsedExpr:
    """Source text, its syntax tree, and the resolved polynomial."""

    source: str
    ast: tuple
    poly: Polynomial


class _Parser:
    def __init__(self, text: str, n: int, config: FieldConfig):
        self.text = text
        self.n = n
        self.config = config
        self.tokens = tokenize(text)
        self.k = 0

    def peek(self) -> Token:
        return self.tokens[self.k]

    def advance(self) -> Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind}, found {tok.text or 'end of input'!r}", tok.pos)
        return self.advance()

    # -- grammar -----------------------------------------------------------

    def parse(self) -> tuple:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return node

    def expr(self) -> tuple:
        tok = self.peek()
        if tok.kind in ("plus", "minus"):
            self.advance()
            node = self.term()
            if tok.kind == "minus":
                node = ("neg", node)
        else:
            node = self.term()
        while self.peek().kind in ("plus", "minus"):
            op = self.advance()
            rhs = self.term()
            node = ("add" if op.kind == "plus" else "sub", node, rhs)
        return node

    def term(self) -> tuple:
        node = self.factor()
        while self.peek().kind == "star":
            self.advance()
            node = ("mul", node, self.factor())
        return node

    def factor(self) -> tuple:
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            value = Fraction(int(tok.text))
            if self.peek().kind == "slash":
                self.advance()
                den = self.expect("int")
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.pos)
                value = Fraction(int(tok.text), int(den.text))
            return ("num", value)
        if tok.kind == "zeta":
            self.advance()
            power = 1
            if self.peek().kind == "caret":
                self.advance()
                sign = 1
                if self.peek().kind == "minus":
                    self.advance()
                    sign = -1
                power = sign * int(self.expect("int").text)
            return ("zeta", power, tok.pos)
        if tok.kind == "var":
            self.advance()
            index = int(tok.text[1:])
            power = 1
            if self.peek().kind == "caret":
                self.advance()
                if self.peek().kind == "minus":
                    raise ParseError("negative exponent", self.peek().pos)
                power = int(self.expect("int").text)
            return ("var", index, power, tok.pos)
        if tok.kind == "lparen":
            self.advance()
            node = self.expr()
            self.expect("rparen")
            return node
        raise ParseError(
            f"expected a factor, found {tok.text or 'end of input'!r}", tok.pos
        )

    # -- resolution ----------------------------------------------------------

    def resolve(self, node) -> Polynomial:
        kind = node[0]
        if kind == "num":
            return Polynomial.constant(self.n, self.config, node[1])
        if kind == "zeta":
            _, power, pos = node
            if self.config.m == 1:
                raise ParseError("z needs a field with m > 1", pos)
            return Polynomial.constant(self.n, self.config, self.config.zeta() ** power)
        if kind == "var":
            _, index, power, pos = node
            if not 1 <= index <= self.n:
                raise ParseError("variable index out of range", pos)
            beta = tuple(power if i == index - 1 else 0 for i in range(self.n))
            return Polynomial.monomial(self.n, self.config, beta)
        if kind == "neg":
            return -self.resolve(node[1])
        if kind == "add":
            return self.resolve(node[1]) + self.resolve(node[2])
        if kind == "sub":
            return self.resolve(node[1]) - self.resolve(node[2])
        if kind == "mul":
            return self.resolve(node[1]) * self.resolve(node[2])
        raise ParseError(f"unknown node {kind!r}", 1)


def parse_expression(text: str, n: int, config: FieldConfig) -> ParsedExpr:
    parser = _Parser(text, n, config)
    ast = parser.parse()
    return ParsedExpr(text, ast, parser.resolve(ast))


def parse_polynomial(text: str, n: int, config: FieldConfig) -> Polynomial:
    """Parse expression text to an exact polynomial; round-trips with str()."""
    return parse_expression(text, n, config).poly


def parse_scalar(text: str, config: FieldConfig) -> CyclotomicScalar:
    """Parse scalar text (rationals and powers of z) to a field element."""
    poly = parse_polynomial(text, 0, config)
    if poly.is_zero():
        return config.zero
    return poly.terms[()]
