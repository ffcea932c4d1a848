"""The arithmetic expression language used for form components.

Grammar (lowest to highest precedence)::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := NUMBER | VAR | 'pi' | FN '(' sum ')' | '(' sum ')'

Variables are ``t``, ``x<k>`` and ``y<k>`` with ``1 <= k <= m``; functions
are ``sin cos exp ln sqrt``.  Implicit multiplication is not accepted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from . import jet
from .errors import DomainError, NumericError, ParseError, UnknownIdentifierError, VariableRangeError
from .jet import Jet2

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")
_BINARY_SYMBOL = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "^"}
_SYMBOL_BINARY = {v: k for k, v in _BINARY_SYMBOL.items()}


@dataclass(frozen=True)
class Number:
    value: float
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Expr"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: int = field(default=-1, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    fn: str
    child: "Expr"
    pos: int = field(default=-1, compare=False, repr=False)


Expr = Union[Number, Var, Unary, Binary, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)
_VAR = re.compile(r"([xy])(\d+)")


def tokenize(source: str) -> list[tuple[str, str, int]]:
    """Split ``source`` into (kind, text, offset) triples ending with an 'end' token."""
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str, dimension: int):
        self.tokens = tokenize(source)
        self.i = 0
        self.m = dimension

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, pos = self.take()
        if value != text or kind != "op":
            found = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected {text!r}, found {found}", pos)

    def parse(self) -> Expr:
        expr = self.sum()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {value!r}", pos)
        return expr

    def sum(self) -> Expr:
        left = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, sym, pos = self.take()
            left = Binary(_SYMBOL_BINARY[sym], left, self.product(), pos)
        return left

    def product(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, sym, pos = self.take()
            left = Binary(_SYMBOL_BINARY[sym], left, self.unary(), pos)
        return left

    def unary(self) -> Expr:
        kind, value, pos = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Unary("neg", self.unary(), pos)
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.take()
            return Binary("pow", base, self.unary(), pos)
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.take()
        if kind == "num":
            return Number(float(value), pos)
        if kind == "op" and value == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        if kind == "ident":
            return self.identifier(value, pos)
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {found}", pos)

    def identifier(self, name: str, pos: int) -> Expr:
        if name in FUNCTIONS:
            self.expect("(")
            arg = self.sum()
            self.expect(")")
            return Call(name, arg, pos)
        if name == "pi":
            return Number(math.pi, pos)
        if name == "t":
            return Var("t", pos)
        m = _VAR.fullmatch(name)
        if m is None:
            raise UnknownIdentifierError(f"unknown identifier {name!r}", pos)
        k = int(m.group(2))
        if not 1 <= k <= self.m:
            raise VariableRangeError(f"variable {name!r} outside 1..{self.m}", pos)
        return Var(f"{m.group(1)}{k}", pos)


def parse(source: str, dimension: int) -> Expr:
    """Parse ``source`` into an expression tree over the chart of dimension ``dimension``."""
    if dimension < 1:
        raise ValueError("dimension must be positive")
    if not source.isascii():
        bad = next(i for i, ch in enumerate(source) if not ch.isascii())
        raise ParseError("non-ASCII character", bad)
    return _Parser(source, dimension).parse()


def free_vars(expr: Expr) -> frozenset[str]:
    out: set[str] = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, (Unary, Call)):
            stack.append(node.child)
        elif isinstance(node, Binary):
            stack.extend((node.left, node.right))
    return frozenset(out)


# printing ---------------------------------------------------------------

_PREC = {"add": 1, "sub": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}
_ATOM = 5


def _prec(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _PREC["neg"]
    if isinstance(node, Number) and node.value < 0:
        return _PREC["neg"]
    return _ATOM


def _number_text(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_text(expr: Expr) -> str:
    """Canonical text with the fewest parentheses that reparse to the same tree."""
    if isinstance(expr, Number):
        return _number_text(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.fn}({to_text(expr.child)})"
    if isinstance(expr, Unary):
        inner = to_text(expr.child)
        return "-" + (f"({inner})" if _prec(expr.child) < _PREC["neg"] else inner)
    p = _PREC[expr.op]
    left, right = to_text(expr.left), to_text(expr.right)
    if expr.op == "pow":
        if _prec(expr.left) <= p:
            left = f"({left})"
        if _prec(expr.right) < p:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(expr.left) < p:
        left = f"({left})"
    if _prec(expr.right) <= p:
        right = f"({right})"
    sym = _BINARY_SYMBOL[expr.op]
    return f"{left} {sym} {right}" if p == 1 else f"{left}{sym}{right}"


# evaluation -------------------------------------------------------------

Env = Mapping[str, Union[float, Jet2]]
Compiled = Callable[[Env], Union[float, Jet2]]


def _located(fn: Callable, pos: int) -> Callable:
    def guarded(*args):
        try:
            return fn(*args)
        except DomainError as err:
            if err.pos is None:
                raise DomainError(err.fn, err.value, pos) from None
            raise
        except OverflowError:
            raise NumericError(f"overflow at offset {pos}") from None

    return guarded


def compile_expr(expr: Expr) -> Compiled:
    """Turn the tree into a closure usable with float or jet environments."""
    if isinstance(expr, Number):
        v = expr.value
        return lambda env: v
    if isinstance(expr, Var):
        name = expr.name
        return lambda env: env[name]
    if isinstance(expr, Unary):
        c = compile_expr(expr.child)
        return lambda env: -c(env)
    if isinstance(expr, Call):
        c = compile_expr(expr.child)
        f = _located(jet.UNARY[expr.fn], expr.pos)
        return lambda env: f(c(env))
    lf, rf = compile_expr(expr.left), compile_expr(expr.right)
    op = jet.BINARY[expr.op]
    if expr.op in ("div", "pow"):
        op = _located(op, expr.pos)
    return lambda env: op(lf(env), rf(env))


def eval_jet(expr: Expr | Compiled, env: Mapping[str, Jet2], n: int | None = None) -> Jet2:
    """Evaluate to a jet; ``n`` is only needed when ``env`` is empty."""
    fn = expr if callable(expr) else compile_expr(expr)
    out = fn(env)
    if isinstance(out, Jet2):
        return out
    if n is None:
        if not env:
            raise ValueError("cannot size a constant jet without variables")
        n = next(iter(env.values())).n
    return Jet2.constant(out, n)


def eval_real(expr: Expr | Compiled, env: Mapping[str, float]) -> float:
    fn = expr if callable(expr) else compile_expr(expr)
    return float(fn(env))


def add_exprs(*terms: Expr) -> Expr:
    """Left-nested sum, skipping literal zeros."""
    kept = [e for e in terms if not (isinstance(e, Number) and e.value == 0)]
    if not kept:
        return Number(0.0)
    out = kept[0]
    for e in kept[1:]:
        out = Binary("add", out, e)
    return out


def mul_exprs(a: Expr, b: Expr) -> Expr:
    return Binary("mul", a, b)
