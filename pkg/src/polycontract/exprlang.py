"""A tiny exact expression language for piecewise maps and coefficient functions.

Grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | power
    power  := atom ('^' INTEGER)?
    atom   := RATIONAL | 'x' | 'y' | 'abs' '(' expr ')' | '(' expr ')'

``RATIONAL`` is an integer, an exact decimal (``0.25``) or ``p/q``.  There is
no division operator, so ``1/2`` is always a single literal.  Evaluation is
exact: inputs may be ``Fraction`` scalars or :class:`RatArray` values, and
nothing is ever converted to floating point.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import InputError
from .rational import format_rational


class ParseError(InputError):
    def __init__(self, position: int, expected: str, source: str = ""):
        self.position = position
        self.expected = expected
        self.source = source
        found = source[position : position + 1] or "end of input"
        super().__init__(f"at offset {position}: expected {expected}, found {found!r}")


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class Sum:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Product:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


@dataclass(frozen=True)
class Abs:
    operand: "Expression"


Expression = Union[Const, Var, Neg, Sum, Product, Pow, Abs]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+\s*/\s*\d+|\d+(?:\.\d+)?)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


def _tokenize(source: str) -> list:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ParseError(pos, "a number, 'x', 'y', 'abs', operator or parenthesis", source)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(pos, f"'{op}'", self.source)
        self.take()

    def parse(self) -> Expression:
        node = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError(pos, "operator or end of input", self.source)
        return node

    def expr(self) -> Expression:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                rhs = self.term()
                node = Sum(node, rhs if text == "+" else Neg(rhs))
            else:
                return node

    def term(self) -> Expression:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text == "*":
                self.take()
                node = Product(node, self.factor())
            else:
                return node

    def factor(self) -> Expression:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, pos = self.take()
            if kind != "number" or not text.isdigit():
                raise ParseError(pos, "non-negative integer exponent", self.source)
            return Pow(base, int(text))
        return base

    def atom(self) -> Expression:
        kind, text, pos = self.take()
        if kind == "number":
            try:
                return Const(Fraction(text.replace(" ", "")))
            except ZeroDivisionError:
                raise ParseError(pos, "rational with non-zero denominator", self.source) from None
        if kind == "name":
            if text in ("x", "y"):
                return Var(text)
            if text == "abs":
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Abs(inner)
            raise ParseError(pos, "'x', 'y' or 'abs'", self.source)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(pos, "a number, 'x', 'y', 'abs(' or '('", self.source)


def parse(source: str) -> Expression:
    """Parse ``source`` into an expression tree; raises :class:`ParseError`."""
    return _Parser(source).parse()


def to_source(e: Expression) -> str:
    """Canonical, fully parenthesised text; ``parse(to_source(e)) == e``."""
    if isinstance(e, Const):
        return format_rational(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"-{to_source(e.operand)}"
    if isinstance(e, Sum):
        return f"({to_source(e.left)} + {to_source(e.right)})"
    if isinstance(e, Product):
        return f"({to_source(e.left)} * {to_source(e.right)})"
    if isinstance(e, Pow):
        base = to_source(e.base)
        if not isinstance(e.base, (Var, Const)):
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Abs):
        return f"abs({to_source(e.operand)})"
    raise TypeError(f"not an expression node: {e!r}")


def variables(e: Expression) -> frozenset:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, (Neg, Abs)):
        return variables(e.operand)
    if isinstance(e, Pow):
        return variables(e.base)
    return variables(e.left) | variables(e.right)


def evaluate(e: Expression, x=None, y=None):
    """Evaluate ``e`` exactly at ``x`` (and ``y``).

    ``x``/``y`` may be ints, Fractions or RatArrays; the result has the
    matching type (a Fraction when the tree has no variables).
    """
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        value = x if e.name == "x" else y
        if value is None:
            raise InputError(f"variable {e.name!r} is unbound")
        return Fraction(value) if isinstance(value, int) else value
    if isinstance(e, Neg):
        return -evaluate(e.operand, x, y)
    if isinstance(e, Sum):
        return evaluate(e.left, x, y) + evaluate(e.right, x, y)
    if isinstance(e, Product):
        return evaluate(e.left, x, y) * evaluate(e.right, x, y)
    if isinstance(e, Pow):
        return evaluate(e.base, x, y) ** e.exponent
    if isinstance(e, Abs):
        return abs(evaluate(e.operand, x, y))
    raise TypeError(f"not an expression node: {e!r}")


def constant_value(e: Expression) -> Optional[Fraction]:
    """The value of a variable-free expression, else None."""
    if variables(e):
        return None
    return evaluate(e)
