"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := var | number | '(' expr ')'
    number := float ('i')? | float ('+'|'-') float 'i'

A single leading ``-`` or ``+`` on a term is also accepted, so printed
polynomials with a negative first coefficient read back unchanged. The
complex literal ``a+bi`` binds tighter than ``+``: ``2*1+2i`` is ``2*(1+2i)``.
"""

from __future__ import annotations

import re
from typing import Sequence

from .poly import Poly, default_names

_FLOAT = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_COMPLEX_RE = re.compile(rf"({_FLOAT})\s*([+-])\s*({_FLOAT})\s*i(?![A-Za-z0-9_])")
_IMAG_RE = re.compile(rf"({_FLOAT})\s*i(?![A-Za-z0-9_])")
_REAL_RE = re.compile(_FLOAT)
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_UINT_RE = re.compile(r"\d+(?![.\deE])")


class PolySyntaxError(ValueError):
    """Malformed expression; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.text = text
        self.pos = 0
        self.names = {n: i for i, n in enumerate(names)}
        self.n = len(names)

    def error(self, msg, pos=None):
        raise PolySyntaxError(msg, self.pos if pos is None else pos, self.text)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Poly:
        if not self.text.strip():
            self.error("empty expression")
        p = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return p

    def expr(self) -> Poly:
        sign = self.peek()
        if sign in "+-" and sign:
            self.pos += 1
            acc = self.term()
            if sign == "-":
                acc = -acc
        else:
            acc = self.term()
        while self.peek() in ("+", "-") and self.peek():
            op = self.peek()
            self.pos += 1
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        b = self.base()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            start = self.pos
            if self.peek() == "-":
                self.error("negative exponent", start)
            m = _UINT_RE.match(self.text, self.pos)
            if not m:
                if _REAL_RE.match(self.text, self.pos):
                    self.error("non-integer exponent", start)
                self.error("expected non-negative integer exponent", start)
            self.pos = m.end()
            b = b ** int(m.group())
        return b

    def base(self) -> Poly:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return inner
        if not c:
            self.error("unexpected end of expression")
        for regex in (_COMPLEX_RE, _IMAG_RE):
            m = regex.match(self.text, self.pos)
            if m:
                self.pos = m.end()
                if regex is _COMPLEX_RE:
                    re_part, op, im_part = m.groups()
                    val = complex(float(re_part), float(im_part) if op == "+" else -float(im_part))
                else:
                    val = complex(0.0, float(m.group(1)))
                return Poly.constant(self.n, val)
        m = _REAL_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Poly.constant(self.n, float(m.group()))
        m = _NAME_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            if name not in self.names:
                self.error(f"unknown variable {name!r}", start)
            self.pos = m.end()
            return Poly.variable(self.n, self.names[name])
        self.error(f"unexpected character {c!r}")


def parse_poly(text: str, variables: Sequence[str] | None = None, num_vars: int | None = None) -> Poly:
    """Parse ``text`` into a :class:`Poly` over the ordered ``variables``.

    If ``variables`` is omitted, ``x1..xN`` with ``N = num_vars`` is used.
    """
    if variables is None:
        if num_vars is None:
            raise ValueError("give either variables or num_vars")
        variables = default_names(num_vars)
    if len(set(variables)) != len(variables) or not variables:
        raise ValueError("variable names must be non-empty and distinct")
    return _Parser(text, list(variables)).parse()
