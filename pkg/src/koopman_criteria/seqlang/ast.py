"""Expression trees for integer-indexed families and their infix parser.

Grammar (usual precedence, ``^`` binds tighter than unary minus)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom (('^' | '**') unary)?
    atom    := number | name | name '(' expr ')' | '(' expr ')'

Exponents must fold to a rational constant, except ``(-1)^n`` which is
read as ``alt(n)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ..errors import ExprSyntaxError, UnknownIdentifier

FUNCTIONS = ("abs", "exp", "log1p", "alt")


class Expr:
    """Base node. Nodes are immutable and hashable."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, q):
        return Pow(self, Fraction(q))

    def __str__(self):
        return unparse(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: Fraction


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Const(float(x))


N = Var("n")


def variables(expr: Expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Const):
        return set()
    out: set[str] = set()
    for child in children(expr):
        out |= variables(child)
    return out


def children(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, (Add, Sub, Mul, Div)):
        return (expr.left, expr.right)
    if isinstance(expr, (Neg, Call)):
        return (expr.arg,)
    if isinstance(expr, Pow):
        return (expr.base,)
    return ()


def substitute(expr: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions."""
    if isinstance(expr, Var):
        return mapping.get(expr.name, expr)
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Neg):
        return Neg(substitute(expr.arg, mapping))
    if isinstance(expr, Call):
        return Call(expr.func, substitute(expr.arg, mapping))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, mapping), expr.exponent)
    return type(expr)(substitute(expr.left, mapping), substitute(expr.right, mapping))


def rational(value: float) -> Fraction:
    """Snap a float to a nearby small-denominator rational when one exists."""
    exact = Fraction(value)
    approx = exact.limit_denominator(10**6)
    if abs(float(approx) - value) <= 1e-13 * max(1.0, abs(value)):
        return approx
    return exact


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[pos + stripped]!r}", _byte(text, pos + stripped), text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _byte(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, names: Iterable[str]):
        self.text = text
        self.names = set(names)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, _byte(self.text, tok.offset), self.text)

    def expect(self, text: str):
        tok = self.take()
        if tok.text != text:
            self.error(f"expected {text!r}", tok)

    def parse(self) -> Expr:
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected token {self.peek().text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take().text
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return Neg(self.unary())
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text in ("^", "**"):
            self.take()
            start = self.peek()
            exponent = self.unary()
            if _folds_to(base, -1.0) and exponent == N:
                return Call("alt", N)
            value = _fold(exponent)
            if value is None:
                self.error("exponent must be a rational constant", start)
            return Pow(base, rational(value))
        return base

    def atom(self) -> Expr:
        tok = self.take()
        if tok.kind == "num":
            return Const(float(tok.text))
        if tok.kind == "name":
            if tok.text in FUNCTIONS:
                if self.peek().text != "(":
                    self.error(f"function {tok.text!r} needs an argument")
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            if tok.text in self.names:
                return Var(tok.text)
            raise UnknownIdentifier(f"unknown identifier {tok.text!r}", _byte(self.text, tok.offset), self.text)
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected token {tok.text!r}", tok)


def _fold(expr: Expr) -> float | None:
    """Evaluate a variable-free arithmetic expression, else None."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Neg):
        v = _fold(expr.arg)
        return None if v is None else -v
    if isinstance(expr, (Add, Sub, Mul, Div)):
        lhs, rhs = _fold(expr.left), _fold(expr.right)
        if lhs is None or rhs is None:
            return None
        if isinstance(expr, Add):
            return lhs + rhs
        if isinstance(expr, Sub):
            return lhs - rhs
        if isinstance(expr, Mul):
            return lhs * rhs
        return None if rhs == 0 else lhs / rhs
    if isinstance(expr, Pow):
        v = _fold(expr.base)
        if v is None or (v < 0 and expr.exponent.denominator != 1) or (v == 0 and expr.exponent < 0):
            return None
        return v ** float(expr.exponent)
    return None


def _folds_to(expr: Expr, target: float) -> bool:
    return _fold(expr) == target


def parse_family(text: str, variables: Iterable[str] = ("n",)) -> Expr:
    """Parse an infix family expression over the index variable ``n``."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text)
    return _Parser(text, variables).parse()


# -- unparse -----------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _prec(expr: Expr) -> int:
    if isinstance(expr, Const) and expr.value < 0:
        return 5
    return _PREC.get(type(expr), 5)


def _wrap(expr: Expr, minimum: int) -> str:
    s = unparse(expr)
    return f"({s})" if _prec(expr) < minimum else s


def unparse(expr: Expr) -> str:
    """Render an expression; ``parse_family(unparse(e))`` evaluates exactly like ``e``."""
    if isinstance(expr, Const):
        s = repr(float(expr.value))
        return f"({s})" if expr.value < 0 else s
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.func}({unparse(expr.arg)})"
    if isinstance(expr, Neg):
        return "-" + _wrap(expr.arg, 3)
    if isinstance(expr, Pow):
        q = expr.exponent
        qs = str(q.numerator) if q.denominator == 1 and q >= 0 else f"({q.numerator}/{q.denominator})"
        return f"{_wrap(expr.base, 5)}^{qs}"
    sym = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(expr)]
    lmin = _PREC[type(expr)]
    return f"{_wrap(expr.left, lmin)} {sym} {_wrap(expr.right, lmin + 1)}"
