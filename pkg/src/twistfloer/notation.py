"""Parser for coefficient strings such as ``t^{3/2}+1``, ``U^2`` or ``(t+1)/t``.

Grammar::

    expr    := ['-'] term (('+' | '-') term)*
    term    := power (('*' | '/')? power)*        juxtaposition multiplies
    power   := atom ('^' exponent)?
    atom    := integer | name | '(' expr ')'
    exponent:= integer | '-' integer | '{' ['-'] integer ['/' integer] '}'

Names are looked up with ``ring.gen``; everything else goes through the
ring's ``add``, ``mul``, ``power`` and ``divide``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        num, name, sym = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(("num", int(num), start))
        elif name is not None:
            out.append(("name", name, start))
        elif sym is not None and not sym.isspace():
            out.append(("sym", sym, start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text, ring, line=None, column=None):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0
        self.line = line
        self.column = column

    def error(self, message, pos=None):
        if pos is None:
            pos = self.toks[self.i][2]
        if self.line is None:
            raise ParseError(f"{message} in {self.text!r}", 1, pos + 1)
        raise ParseError(f"{message} in {self.text!r}", self.line, self.column + pos)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, sym):
        kind, val, pos = self.take()
        if kind != "sym" or val != sym:
            self.error(f"expected {sym!r}", pos)

    def parse(self):
        val = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            self.error("unexpected trailing input", pos)
        return val

    def expr(self):
        R = self.ring
        kind, sym, _ = self.peek()
        if kind == "sym" and sym == "-":
            self.take()
            val = R.neg(self.term())
        else:
            val = self.term()
        while True:
            kind, sym, _ = self.peek()
            if kind == "sym" and sym in "+-":
                self.take()
                rhs = self.term()
                val = R.add(val, rhs) if sym == "+" else R.sub(val, rhs)
            else:
                return val

    def term(self):
        R = self.ring
        val = self.power()
        while True:
            kind, sym, pos = self.peek()
            if kind == "sym" and sym == "*":
                self.take()
                val = R.mul(val, self.power())
            elif kind == "sym" and sym == "/":
                self.take()
                rhs = self.power()
                try:
                    val = R.divide(val, rhs)
                except (ArithmeticError, ZeroDivisionError) as exc:
                    self.error(f"cannot divide: {exc}", pos)
            elif kind in ("num", "name") or (kind == "sym" and sym == "("):
                val = R.mul(val, self.power())
            else:
                return val

    def power(self):
        pos = self.peek()[2]
        base = self.atom()
        kind, sym, _ = self.peek()
        if kind == "sym" and sym == "^":
            self.take()
            e = self.exponent()
            try:
                return self.ring.power(base, e)
            except (ArithmeticError, ZeroDivisionError) as exc:
                self.error(f"bad power: {exc}", pos)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return self.ring.from_int(val)
        if kind == "name":
            try:
                return self.ring.gen(val)
            except KeyError:
                self.error(f"unknown symbol {val!r} for ring {self.ring.name}", pos)
        if kind == "sym" and val == "(":
            out = self.expr()
            self.expect(")")
            return out
        self.error("expected a number, a variable or '('", pos)

    def exponent(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Fraction(val)
        if kind == "sym" and val == "-":
            k2, v2, p2 = self.take()
            if k2 != "num":
                self.error("expected an integer exponent", p2)
            return Fraction(-v2)
        if kind == "sym" and val == "{":
            sign = 1
            if self.peek()[:2] == ("sym", "-"):
                self.take()
                sign = -1
            k2, num, p2 = self.take()
            if k2 != "num":
                self.error("expected an integer exponent", p2)
            den = 1
            if self.peek()[:2] == ("sym", "/"):
                self.take()
                k3, den, p3 = self.take()
                if k3 != "num" or den == 0:
                    self.error("expected a nonzero denominator", p3)
            self.expect("}")
            return Fraction(sign * num, den)
        self.error("expected an exponent", pos)


def parse_coefficient(text: str, ring, line=None, column=None):
    """Parse ``text`` as an element of ``ring``.

    ``line``/``column`` locate the string inside a larger document so that
    errors point at the right place.
    """
    if not isinstance(text, str):
        if isinstance(text, int):
            return ring.from_int(text)
        raise ParseError(f"coefficient must be a string, got {type(text).__name__}", line, column)
    if not text.strip():
        raise ParseError("empty coefficient", line or 1, column or 1)
    return _Parser(text, ring, line, column).parse()


def locate(document: str, needle: str, start: int = 0):
    """1-based (line, column) of the first occurrence of ``needle`` at or after ``start``."""
    idx = document.find(needle, start)
    if idx < 0:
        return None, None
    line = document.count("\n", 0, idx) + 1
    col = idx - (document.rfind("\n", 0, idx) + 1) + 1
    return line, col


def format_grading(g) -> str:
    if g is None:
        return "-"
    g = Fraction(g)
    return str(g.numerator) if g.denominator == 1 else f"{g.numerator}/{g.denominator}"


def parse_grading(x) -> Fraction:
    if x is None:
        return None
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise ParseError("gradings must be integers or exact fraction strings such as \"-3/2\"")
    return Fraction(x)
